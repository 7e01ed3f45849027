"""Error types shared across the kernel."""

from __future__ import annotations


class KernelError(Exception):
    """Base class for every error raised by this package."""


class ParseError(KernelError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class DuplicateNameError(KernelError):
    def __init__(self, name: str) -> None:
        super().__init__(f"name already defined: {name}")
        self.name = name


class IllFormedPatternError(KernelError):
    pass


class ErasureNeedsTypesError(KernelError):
    pass


# Kind tags for TypeCheckError.  Kept as plain strings so errors render and
# compare without extra machinery.
UNKNOWN_CONSTANT = "UnknownConstant"
NO_AXIOM = "NoAxiom"
NO_RULE = "NoRule"
NOT_A_FUNCTION = "NotAFunction"
DOMAIN_MISMATCH = "DomainMismatch"
NOT_A_SORT = "NotASort"
FUEL_EXHAUSTED = "FuelExhausted"


class TypeCheckError(KernelError):
    """A failed typing judgment.

    ``kind`` is one of the tags above, ``path`` locates the offending subterm
    (outermost first), and ``detail`` is a rendered explanation.  ``NoRule``
    errors additionally carry the offending sort pair in ``rule_pair``.
    """

    def __init__(
        self,
        kind: str,
        detail: str,
        path: tuple[str, ...] = (),
        rule_pair: tuple[str, str] | None = None,
    ) -> None:
        where = " at " + ".".join(path) if path else ""
        super().__init__(f"{kind}{where}: {detail}")
        self.kind = kind
        self.detail = detail
        self.path = path
        self.rule_pair = rule_pair

    def at(self, step: str) -> "TypeCheckError":
        """Re-raise helper: prepend one path component."""
        return TypeCheckError(self.kind, self.detail, (step,) + self.path, self.rule_pair)
