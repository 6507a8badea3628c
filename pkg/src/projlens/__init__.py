"""projlens: empirical verification that random projections of a finite
point set look like a scale mixture of spherical Gaussians.

The package computes the profile (the law of ||x|| / sqrt(D)) and its
predicted mixture for a dataset, projects the data with seeded random maps,
measures the sup-over-balls distance between projection and prediction with
three estimators, and evaluates every closed-form rate and tail bound the
theory provides.
"""

from .bounds import (
    EccentricityReport,
    TailConstants,
    discrepancy_rate,
    eccentricity,
    fixed_ball_tail,
    inflation_delta,
    min_dimension_for_tail,
    mixture_inflation_delta,
    smoothed_deviation_tail,
    uniform_ball_tail,
    vc_ball_rate,
)
from .datasets import (
    AtomLaw,
    CsvFormatError,
    EmpiricalLaw,
    PointCloud,
    PowerExponentialLaw,
    Profile,
    SizeLimitError,
    SpectrumSummary,
    center,
    gen_cross_polytope,
    gen_cube,
    gen_simplex,
    gen_spherical,
    gen_two_cluster,
    load_points_csv,
    load_profile_csv,
    profile,
    save_points_csv,
    save_profile_csv,
    sigma_epsilon,
    spectrum,
)
from .discrepancy import (
    BallNet,
    DiscrepancyReport,
    NetParams,
    build_ball_net,
    empirical_mass,
    lipschitz_probe,
    mc_ball_sup,
    net_params_from_bounds,
    net_sandwich,
    radial_sweep_sup,
    smoothed_mass,
    sup_over_net,
)
from .experiments import (
    EXPERIMENT_NAMES,
    ExperimentResult,
    run_cube1d,
    run_decay,
    run_figure4,
    run_profile_table,
    run_residual_variance,
    run_twocluster,
    write_report,
)
from .gaussmix import (
    Ball,
    MixtureModel,
    mixture_ball_mass,
    mixture_second_moment,
    nu_ball_mass,
    resize_ball,
)
from .projection import (
    EigengapWarning,
    ProjectionMap,
    apply,
    gaussian_sample,
    load_projection_map,
    orthonormalize,
    pca_project,
    sample_projection,
    save_projection_map,
)
from .special import chisq_cdf, chisq_cdf_pairs, gamma_ppf, norm_cdf, reg_lower_gamma
from .stats import (
    dip_statistic,
    fit_loglog_slope,
    kolmogorov_sf,
    ks_p_value,
    ks_statistic,
    two_sample_ks,
)

__version__ = "0.1.0"

__all__ = [
    "AtomLaw",
    "Ball",
    "BallNet",
    "CsvFormatError",
    "DiscrepancyReport",
    "EXPERIMENT_NAMES",
    "EccentricityReport",
    "EigengapWarning",
    "EmpiricalLaw",
    "ExperimentResult",
    "MixtureModel",
    "NetParams",
    "PointCloud",
    "PowerExponentialLaw",
    "Profile",
    "ProjectionMap",
    "SizeLimitError",
    "SpectrumSummary",
    "TailConstants",
    "apply",
    "build_ball_net",
    "center",
    "chisq_cdf",
    "chisq_cdf_pairs",
    "discrepancy_rate",
    "dip_statistic",
    "eccentricity",
    "empirical_mass",
    "fit_loglog_slope",
    "fixed_ball_tail",
    "gamma_ppf",
    "gaussian_sample",
    "gen_cross_polytope",
    "gen_cube",
    "gen_simplex",
    "gen_spherical",
    "gen_two_cluster",
    "inflation_delta",
    "kolmogorov_sf",
    "ks_p_value",
    "ks_statistic",
    "lipschitz_probe",
    "load_points_csv",
    "load_profile_csv",
    "load_projection_map",
    "mc_ball_sup",
    "min_dimension_for_tail",
    "mixture_ball_mass",
    "mixture_inflation_delta",
    "mixture_second_moment",
    "net_params_from_bounds",
    "net_sandwich",
    "norm_cdf",
    "nu_ball_mass",
    "orthonormalize",
    "pca_project",
    "profile",
    "radial_sweep_sup",
    "reg_lower_gamma",
    "resize_ball",
    "run_cube1d",
    "run_decay",
    "run_figure4",
    "run_profile_table",
    "run_residual_variance",
    "run_twocluster",
    "sample_projection",
    "save_points_csv",
    "save_profile_csv",
    "save_projection_map",
    "sigma_epsilon",
    "smoothed_deviation_tail",
    "smoothed_mass",
    "spectrum",
    "sup_over_net",
    "two_sample_ks",
    "uniform_ball_tail",
    "vc_ball_rate",
    "write_report",
]
