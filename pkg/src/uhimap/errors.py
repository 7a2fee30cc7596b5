"""Exception hierarchy shared across the toolkit.

Two base classes split failures the way the CLI reports them: bad or
malformed inputs (exit code 2) versus numerical/solver breakdowns
(exit code 3). Anything else is an internal error (exit code 4).
"""


class UhimapError(Exception):
    """Base class for all toolkit errors."""


class InputError(UhimapError):
    """Invalid, malformed or insufficient input data."""


class NumericalError(UhimapError):
    """A solver or numerical routine failed to produce a result."""


# ---- geometry ----------------------------------------------------------

class NonPositiveDepth(InputError):
    """Point at or behind the camera plane passed to a projection."""


class ColumnOutOfRange(InputError):
    """Push-broom column index outside the sensor line."""


class OutOfRange(InputError):
    """Query timestamp outside the trajectory span."""


# ---- io / parsing ------------------------------------------------------

class ParseError(InputError):
    """Malformed file content; message carries line/byte position."""


class DanglingReference(ParseError):
    """Observation references a keyframe or landmark that does not exist."""


class HeaderMismatch(ParseError):
    """Declared header geometry disagrees with the data payload."""


class NonMonotonicTime(ParseError):
    """Timestamps are not strictly increasing."""


class EmptyInput(InputError):
    """An input that must be non-empty was empty."""


# ---- geo-referencing ---------------------------------------------------

class NoAssociations(InputError):
    """No INS fix could be paired with any keyframe."""


class DegenerateConfiguration(InputError):
    """Point configuration too degenerate for alignment (collinear or coincident)."""


class InsufficientAnchors(InputError):
    """Fewer than three anchored keyframes; gauge is not fixed."""


class TooFewPoints(InputError):
    """Not enough 2D-3D correspondences for a pose solve."""


class DivergedFromInit(NumericalError):
    """Refined pose moved implausibly far from its initialization."""


class NumericalFailure(NumericalError):
    """Normal equations singular beyond damping recovery."""


# ---- raycasting / rasters ----------------------------------------------

class EmptyMesh(InputError):
    """Mesh has no usable faces."""


class EmptyOutput(NumericalError):
    """An operation produced no output points where some were required."""


class EmptyCloud(InputError):
    """Point cloud has no points."""


class NoColor(InputError):
    """Mesh lacks the per-vertex colors required for rasterization."""


# ---- refinement --------------------------------------------------------

class NoValidRegion(InputError):
    """Ortho plane has too small a valid region for feature detection."""


class NoMatches(NumericalError):
    """Feature matching produced no surviving matches."""


class MissingProvenance(InputError):
    """Hyperspectral ortho-image lacks the provenance planes."""


class TooFewCorrespondences(InputError):
    """Not enough lifted correspondences to refine the extrinsics."""


class Diverged(NumericalError):
    """Extrinsic refinement produced an implausibly large update."""


# ---- simulator ----------------------------------------------------------

class InvalidSpec(InputError):
    """Scene or trajectory specification is inconsistent."""
