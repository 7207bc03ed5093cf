"""Matrix-free image deblurring with boundary-aware spectral filters."""

from .color import (
    ColorMixing,
    color_tikhonov,
    color_truncated_sd,
    color_truncated_svd,
    cross_channel_blur,
    identity_mixing,
)
from .errors import (
    AsymmetricMaskError,
    ConfigError,
    FormatError,
    InvalidParameterError,
    NotSeparableError,
    SingularMixingError,
    SizeGuardError,
    SizeMismatchError,
    SupportConditionError,
    UnsupportedAlgebraError,
)
from .experiment import (
    ExperimentConfig,
    load_config,
    low_frequency_scene,
    low_frequency_scene_color,
    parse_psf_spec,
    read_config_file,
    run_experiment,
)
from .filtering import (
    FilterSpec,
    RestorationResult,
    SweepCurve,
    Tikhonov,
    TruncateByCount,
    TruncateByThreshold,
    ZERO_SPECTRUM_TOL,
    default_mu_grid,
    mu_sweep,
    rre_sweep,
    save_curve_csv,
    svd_rre_sweep,
    tikhonov_restore,
    truncated_sd_restore,
    truncated_svd_restore,
)
from .imageio import read_image, read_matrix, write_image, write_matrix
from .metrics import (
    NoiseSpec,
    add_noise,
    picard_data,
    rre,
    save_picard_csv,
    snr_from_rho,
    standard_normal_field,
)
from .operators import (
    BlurOperator,
    BoundaryCondition,
    apply_blur,
    assemble_dense,
    assemble_dense_1d,
    blur_oversized_scene,
    fov_crop,
    pad,
)
from .psf import (
    PsfMask,
    condensed_masks,
    gaussian_mask,
    generating_function,
    generating_function_1d,
    identity_mask,
    is_strongly_symmetric,
    load_mask,
    mask_from_weights,
    out_of_focus_mask,
    require_strong_symmetry,
    save_mask,
    separable_factors,
    symmetrize,
)
from .spectrum import (
    EigenGrid,
    eigen_from_first_column,
    eigen_grid_ar,
    eigen_grid_for,
    eigen_grid_reflective,
    eigen_grid_tau,
    save_eigen_csv,
    sort_spectrum,
    spectral_analysis,
    spectral_synthesis,
    synthesis_kind,
    tau_eigenvalues,
)
from .transforms import (
    RampVector,
    TransformKind,
    apply_transform,
    ar_apply,
    ar_inverse_apply,
    dct3_apply,
    dense_transform,
    dst1_apply,
    ramp_vector,
    two_level_apply,
)

__version__ = "0.1.0"

__all__ = [
    "AsymmetricMaskError",
    "BlurOperator",
    "BoundaryCondition",
    "ColorMixing",
    "ConfigError",
    "EigenGrid",
    "ExperimentConfig",
    "FilterSpec",
    "FormatError",
    "InvalidParameterError",
    "NoiseSpec",
    "NotSeparableError",
    "PsfMask",
    "RampVector",
    "RestorationResult",
    "SingularMixingError",
    "SizeGuardError",
    "SizeMismatchError",
    "SupportConditionError",
    "SweepCurve",
    "Tikhonov",
    "TransformKind",
    "TruncateByCount",
    "TruncateByThreshold",
    "UnsupportedAlgebraError",
    "ZERO_SPECTRUM_TOL",
    "add_noise",
    "apply_blur",
    "apply_transform",
    "ar_apply",
    "ar_inverse_apply",
    "assemble_dense",
    "assemble_dense_1d",
    "blur_oversized_scene",
    "color_tikhonov",
    "color_truncated_sd",
    "color_truncated_svd",
    "condensed_masks",
    "cross_channel_blur",
    "dct3_apply",
    "default_mu_grid",
    "dense_transform",
    "dst1_apply",
    "eigen_from_first_column",
    "eigen_grid_ar",
    "eigen_grid_for",
    "eigen_grid_reflective",
    "eigen_grid_tau",
    "fov_crop",
    "gaussian_mask",
    "generating_function",
    "generating_function_1d",
    "identity_mask",
    "identity_mixing",
    "is_strongly_symmetric",
    "load_config",
    "load_mask",
    "low_frequency_scene",
    "low_frequency_scene_color",
    "mask_from_weights",
    "mu_sweep",
    "out_of_focus_mask",
    "pad",
    "parse_psf_spec",
    "picard_data",
    "ramp_vector",
    "read_config_file",
    "read_image",
    "read_matrix",
    "require_strong_symmetry",
    "rre",
    "rre_sweep",
    "run_experiment",
    "save_curve_csv",
    "save_eigen_csv",
    "save_mask",
    "save_picard_csv",
    "separable_factors",
    "snr_from_rho",
    "sort_spectrum",
    "spectral_analysis",
    "spectral_synthesis",
    "standard_normal_field",
    "svd_rre_sweep",
    "symmetrize",
    "synthesis_kind",
    "tau_eigenvalues",
    "tikhonov_restore",
    "truncated_sd_restore",
    "truncated_svd_restore",
    "two_level_apply",
    "write_image",
    "write_matrix",
]
