#pragma once

#include <stdexcept>
#include <string>

namespace causalkit {

// Root of the library's exception hierarchy.  Errors that indicate a bad
// input (config, schema, precondition) derive from ValidationError; errors
// that surface mid-computation (I/O, numerical failure) derive directly
// from Error.  The CLI maps ValidationError to exit code 1 and everything
// else to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// -- graph ----------------------------------------------------------------
class CycleError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DuplicateError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnknownNodeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class OverlapError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NodeMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// -- scm ------------------------------------------------------------------
class SyntaxError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InconsistentParentsError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// -- data -----------------------------------------------------------------
class ConstantColumnError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptySplitError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class LengthMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// -- models ---------------------------------------------------------------
class RankDeficiencyError : public Error {
public:
    using Error::Error;
};

class EmptyFeatureError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

class MissingPredictorError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UntrainedError : public Error {
public:
    using Error::Error;
};

// -- explain --------------------------------------------------------------
class TooManyFeaturesError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyBackgroundError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// -- independence ---------------------------------------------------------
class InsufficientSamplesError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

// -- harness --------------------------------------------------------------
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace causalkit
