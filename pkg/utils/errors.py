from pydantic import ValidationError


class HawkesInputError(ValueError):
    """Input failed validation: malformed data, bad flags or a violated precondition."""


class HawkesNumericalError(ArithmeticError):
    """A computation produced a non-finite value or could not reach a usable answer."""


def describe_validation_error(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err.get("loc", ())) or "value"
        parts.append(f"{loc}: {err.get('msg')}")
    return "; ".join(parts)
