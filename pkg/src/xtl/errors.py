"""Exception hierarchy shared by every xtl module."""


class XtlError(Exception):
    """Base class; everything the library raises deliberately derives from it."""


class ParseError(XtlError):
    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"{line}:{column}: {message}")


class MappingError(XtlError):
    def __init__(self, path, missing):
        self.path = path
        self.missing = missing
        super().__init__(f"{path}: {missing}")


class DuplicateMacro(XtlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"macro {name!r} defined more than once")


class UnmappableNode(XtlError):
    pass


class NormalizeError(XtlError):
    pass


class UnboundMacro(XtlError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"no macro named {name!r}")


class RecursionLimitExceeded(XtlError):
    def __init__(self, depth):
        self.depth = depth
        super().__init__(f"macro expansion exceeded depth {depth}")


class RootNotElement(XtlError):
    pass


class PluginError(XtlError):
    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class QuerySyntaxError(XtlError):
    def __init__(self, expr, message):
        self.expr = expr
        self.message = message
        super().__init__(f"cannot parse select expression {expr!r}: {message}")


class InstanceContainsCommands(XtlError):
    pass


class InvalidShape(XtlError):
    pass


class RegexSyntaxError(XtlError):
    pass


class UnknownSymbol(XtlError):
    def __init__(self, symbol):
        self.symbol = symbol
        super().__init__(f"symbol {symbol!r} is not in the automaton's alphabet")
