"""Interactive 3D competitive region-growing segmentation and volumetry."""

from .errors import (
    BothEmpty,
    EmptyMask,
    GridMismatch,
    IndexOutOfBounds,
    InsufficientSeeds,
    IoFailure,
    MalformedHeader,
    NoSeeds,
    NonBinaryMask,
    TooFewValues,
    TruncatedPayload,
    UnknownOperation,
    UnsupportedField,
    VoxsegError,
)
from .grid import (
    LabelVolume,
    ScalarVolume,
    StrengthField,
    ensure_grid_compatible,
    grids_compatible,
    voxel_center_mm,
)
from .growcut import (
    GrowCutConfig,
    GrowCutEngine,
    RoiBox,
    SegmentationResult,
    growcut_run,
    growcut_run_naive,
    roi_from_seeds,
)
from .metrics import (
    AgreementStats,
    BoundaryPointSet,
    HausdorffDistances,
    aggregate_stats,
    boundary_points,
    dice,
    hausdorff,
    macdonald_product,
)
from .morphology import (
    ComponentLabeling,
    StructuringElement,
    connected_components,
    dilate,
    erode,
    remove_islands,
)
from .nrrd_io import read_nrrd, volume_from_nrrd_bytes, volume_to_nrrd_bytes, write_nrrd
from .phantom import PhantomSpec, canonical_seeds, sphere_phantom
from .volumetry import (
    CaseReport,
    PhaseTimer,
    Report,
    ReportInput,
    build_report,
    mask_volume_mm3,
    slice_span,
    timer_scope,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
