#pragma once

#include <stdexcept>
#include <string>

namespace roleplan {

// Root of every error thrown by the library. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// model backends
class WireError : public Error {
public:
    using Error::Error;
};
class ModalityError : public Error {
public:
    using Error::Error;
};
class EmptyResponse : public Error {
public:
    using Error::Error;
};
class ImageUnreadable : public Error {
public:
    using Error::Error;
};

// pipeline construction and execution
class InvalidModality : public Error {
public:
    using Error::Error;
};
class TopologyError : public Error {
public:
    using Error::Error;
};
class MissingContext : public Error {
public:
    using Error::Error;
};
class PromptPackError : public Error {
public:
    using Error::Error;
};

// A backend failure annotated with the task that was running when it happened.
class TaskFailure : public Error {
public:
    TaskFailure(std::string task_id, std::string failure_class, const std::string& what)
        : Error("task '" + task_id + "' failed (" + failure_class + "): " + what),
          task_id_(std::move(task_id)),
          failure_class_(std::move(failure_class)) {}

    const std::string& task_id() const noexcept { return task_id_; }
    const std::string& failure_class() const noexcept { return failure_class_; }

private:
    std::string task_id_;
    std::string failure_class_;
};

// data files
class SchemaError : public Error {
public:
    SchemaError(std::string field_path, const std::string& what)
        : Error(field_path.empty() ? what : field_path + ": " + what),
          field_path_(std::move(field_path)) {}

    const std::string& field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};
class MalformedDag : public Error {
public:
    using Error::Error;
};
class CyclicPrecedence : public MalformedDag {
public:
    using MalformedDag::MalformedDag;
};

// evaluation
class UnpricedModel : public Error {
public:
    using Error::Error;
};
class OutOfRange : public Error {
public:
    using Error::Error;
};
class JudgeFamilyConflict : public Error {
public:
    using Error::Error;
};
class JudgeParseError : public Error {
public:
    using Error::Error;
};

// runner
class ConfigError : public Error {
public:
    using Error::Error;
};
class NotFound : public Error {
public:
    using Error::Error;
};

} // namespace roleplan
