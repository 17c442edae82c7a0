"""Exception hierarchy for the temporal walk sketch library."""


class TwmError(Exception):
    """Base class for all library errors."""


class MalformedRecord(TwmError):
    def __init__(self, line_no, line, reason):
        super().__init__(f"line {line_no}: {reason}: {line!r}")
        self.line_no = line_no
        self.line = line


class NonMonotonicTimestamp(TwmError):
    def __init__(self, line_no, t, t_prev):
        super().__init__(
            f"line {line_no}: timestamp {t} decreases below previous {t_prev}"
        )
        self.line_no = line_no


class SelfLoop(TwmError):
    def __init__(self, line_no, node):
        super().__init__(f"line {line_no}: self-loop on node {node}")
        self.line_no = line_no
        self.node = node


class OriginTooLarge(TwmError):
    pass


class WalkExplosion(TwmError):
    def __init__(self, count, cap):
        super().__init__(f"walk enumeration exceeded cap: {count} > {cap}")
        self.count = count
        self.cap = cap


class SchemeMismatch(TwmError):
    pass


class TimestampRegression(TwmError):
    pass


class CapacityOverflow(TwmError):
    pass


class HopOutOfRange(TwmError):
    pass


class CorruptSnapshot(TwmError):
    pass


class VersionMismatch(TwmError):
    pass
