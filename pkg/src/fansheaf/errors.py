"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or invalid input: fan files, cones, maps, configs."""


class WindowExhausted(RuntimeError):
    """A computation found new minimal generators inside the guard zone
    (the top two degrees of the window), so results above are unreliable.
    """

    def __init__(self, message, cone=None, degree=None):
        super().__init__(message)
        self.cone = cone
        self.degree = degree


class CertificateError(RuntimeError):
    """An exact certificate that should hold for valid inputs failed."""
