"""Exception hierarchy shared by all modules."""


class KnotShadowError(Exception):
    """Base class for every error raised by this package."""


class ParseError(KnotShadowError):
    pass


class NotDoubleOccurrence(KnotShadowError):
    pass


class NotSpherical(KnotShadowError):
    pass


class Disconnected(KnotShadowError):
    pass


class InvalidMap(KnotShadowError):
    """alpha/sigma do not describe a single generic closed curve."""


class DartNotInProjection(KnotShadowError):
    pass


class StaleMoveInstance(KnotShadowError):
    pass


class ParameterOutOfDomain(KnotShadowError):
    pass


class MalformedCertificate(KnotShadowError):
    pass


class CertificateContradiction(KnotShadowError):
    """A move that a valid certificate rules out was requested."""


class UnclassifiableCase(KnotShadowError):
    """No case of the transport analysis matched; this should never happen."""
