#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace akisub {

/// Machine-readable failure classes. The CLI prints the category name and
/// maps it to a nonzero exit code.
enum class ErrorCategory {
    dimension,
    argument,
    optimization,
    config,
    parse,
    insufficient_data,
    contract,
    schema,
    imputation,
    training,
    metric,
    fold,
    dependency,
    data,
    numerical_rank,
    degenerate_input,
    io,
};

std::string_view category_name(ErrorCategory category);
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
   public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

   private:
    ErrorCategory category_;
};

#define AKISUB_DEFINE_ERROR(Name, Category)                                   \
    class Name : public Error {                                               \
       public:                                                                \
        explicit Name(const std::string& message) : Error(ErrorCategory::Category, message) {} \
    };

AKISUB_DEFINE_ERROR(DimensionError, dimension)
AKISUB_DEFINE_ERROR(ArgumentError, argument)
AKISUB_DEFINE_ERROR(OptimizationError, optimization)
AKISUB_DEFINE_ERROR(ConfigError, config)
AKISUB_DEFINE_ERROR(ParseError, parse)
AKISUB_DEFINE_ERROR(InsufficientDataError, insufficient_data)
AKISUB_DEFINE_ERROR(ContractError, contract)
AKISUB_DEFINE_ERROR(SchemaError, schema)
AKISUB_DEFINE_ERROR(ImputationError, imputation)
AKISUB_DEFINE_ERROR(TrainingError, training)
AKISUB_DEFINE_ERROR(MetricError, metric)
AKISUB_DEFINE_ERROR(FoldError, fold)
AKISUB_DEFINE_ERROR(DependencyError, dependency)
AKISUB_DEFINE_ERROR(DataError, data)
AKISUB_DEFINE_ERROR(NumericalRankError, numerical_rank)
AKISUB_DEFINE_ERROR(DegenerateInputError, degenerate_input)
AKISUB_DEFINE_ERROR(IoError, io)

#undef AKISUB_DEFINE_ERROR

inline std::string_view category_name(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::dimension: return "dimension_error";
        case ErrorCategory::argument: return "argument_error";
        case ErrorCategory::optimization: return "optimization_error";
        case ErrorCategory::config: return "config_error";
        case ErrorCategory::parse: return "parse_error";
        case ErrorCategory::insufficient_data: return "insufficient_data";
        case ErrorCategory::contract: return "contract_violation";
        case ErrorCategory::schema: return "schema_error";
        case ErrorCategory::imputation: return "imputation_error";
        case ErrorCategory::training: return "training_error";
        case ErrorCategory::metric: return "metric_error";
        case ErrorCategory::fold: return "fold_error";
        case ErrorCategory::dependency: return "stage_dependency_error";
        case ErrorCategory::data: return "data_error";
        case ErrorCategory::numerical_rank: return "numerical_rank_error";
        case ErrorCategory::degenerate_input: return "degenerate_input";
        case ErrorCategory::io: return "io_error";
    }
    return "unknown_error";
}

inline int exit_code(ErrorCategory category) {
    return 10 + static_cast<int>(category);
}

}  // namespace akisub
