#pragma once

#include "scarforge/experiment.hpp"

#include <functional>
#include <string>
#include <vector>

namespace scarforge::experiment::detail {

enum class ParamKind { Number, NumberList, Integer, IntegerList, Text, Flag };

struct ParamSpec {
    std::string name;
    ParamKind kind;
    ParamValue fallback;
};

struct PipelineDef {
    std::string name;
    std::vector<ParamSpec> params;
    std::function<PipelineResult(const ExperimentConfig&)> run;
};

const std::vector<PipelineDef>& registry();
const PipelineDef& find_pipeline(const std::string& name);

ParamValue number(double v);
ParamValue numbers(std::vector<double> v);
ParamValue text(std::string v);
ParamValue flag(bool v);

}  // namespace scarforge::experiment::detail
