"""Temporal interval pattern mining + adaptive multi-task activity recognition."""

from tpmtl._core import (  # noqa: F401
    Action,
    Activity,
    AllenRelation,
    ClassTemplate,
    CVResult,
    FeatureSpace,
    FitResult,
    Hyperparams,
    LabeledCorpus,
    MiningConfig,
    ModelMode,
    PatternInstance,
    Prediction,
    RelatednessReport,
    SolverConfig,
    SupportAggregation,
    TaskCovariance,
    TemporalPattern,
    TrainedModel,
    TrainOptions,
    TrainSummary,
    WindowMode,
    allen_inverse,
    allen_relation,
    benchmark_templates,
    featurize,
    find_instances,
    fit_alternating,
    generate,
    is_subpattern,
    kfold_cv,
    load_model,
    mine,
    normalize_activity,
    objective,
    paired_t_test,
    pattern_support,
    predict,
    prox_l1,
    prox_l21,
    read_activity_file,
    relatedness_report,
    save_model,
    smooth_gradient,
    solve_omega,
    solve_w,
    train,
    write_activity_file,
)

__version__ = "0.1.0"
