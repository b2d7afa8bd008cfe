#pragma once

#include <stdexcept>
#include <string>

namespace s3forge {

// Error taxonomy shared across the library. The CLI maps ErrorClass to
// process exit codes (Data -> 2, Transport -> 3).
enum class ErrorClass { Usage, Data, Transport };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), cls_(cls), kind_(std::move(kind)) {}

    ErrorClass error_class() const noexcept { return cls_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorClass cls_;
    std::string kind_;
};

#define S3FORGE_DEFINE_ERROR(Name, Class)                           \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& msg)                       \
            : Error(ErrorClass::Class, #Name, msg) {}               \
    }

S3FORGE_DEFINE_ERROR(SchemaError, Data);
S3FORGE_DEFINE_ERROR(GeometryError, Data);
S3FORGE_DEFINE_ERROR(ReferenceError, Data);
S3FORGE_DEFINE_ERROR(CapacityError, Data);
S3FORGE_DEFINE_ERROR(NoPathError, Data);
S3FORGE_DEFINE_ERROR(InsufficientDurationError, Data);
S3FORGE_DEFINE_ERROR(AuditError, Data);
S3FORGE_DEFINE_ERROR(ClockError, Data);
S3FORGE_DEFINE_ERROR(ParseError, Data);
S3FORGE_DEFINE_ERROR(RangeError, Data);
S3FORGE_DEFINE_ERROR(FormatError, Data);
S3FORGE_DEFINE_ERROR(IoError, Data);
S3FORGE_DEFINE_ERROR(AdapterError, Transport);

#undef S3FORGE_DEFINE_ERROR

}  // namespace s3forge
