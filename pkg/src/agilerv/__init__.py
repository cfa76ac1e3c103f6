"""Frequency-agile radar simulation and rigid/non-rigid target discrimination.

Pipeline: scene micro-motion -> frequency-agile echo synthesis ->
range-velocity map construction -> handcrafted feature extraction ->
gradient-boosted-tree classification, with an experiment harness and
CLI for dataset sweeps across sea states.
"""

from .config import RunConfig, default_run_config, load_run_config, write_run_config
from .echo import (
    HopCode,
    PulseTrain,
    add_clutter,
    baseband_grid,
    generate_hop_code,
    read_pulse_train,
    reference_spectrum,
    synthesize_echo,
    write_pulse_train,
)
from .features import (
    FeatureConfig,
    FeatureRecord,
    FeatureVector,
    ScatterPoint,
    compute_ccf,
    compute_mwr,
    compute_spreads,
    extract_scatter_points,
    featurize,
    read_feature_table,
    write_feature_table,
)
from .gbdt import (
    GBDTConfig,
    TrainedModel,
    TreeNode,
    evaluate,
    load_model,
    model_from_text,
    model_to_text,
    predict_margin,
    predict_proba,
    save_model,
    train,
)
from .harness import (
    ExperimentPlan,
    RunReport,
    build_condition_map,
    generate_dataset,
    rank_auc,
    run_experiment,
    split_dataset,
)
from .params import C, RadarParams, carrier_frequency
from .rvmap import (
    CompressedSpectra,
    RVMap,
    build_rv_map,
    coherent_integrate,
    doppler_compensate,
    pulse_compress,
    rcm_correct,
    read_rv_map_npz,
    render_rv_map_png,
    stitch_spectrum,
    synthesize_hrrp,
    velocity_grid,
    write_rv_map_csv,
    write_rv_map_npz,
)
from .scene import (
    REFLECTOR_ARRAY,
    SHIP,
    SHIP_STATIONS,
    AttitudeSeries,
    MotionModel,
    ObservationGeometry,
    ScattererState,
    SeaState,
    TargetModel,
    TargetUnit,
    default_reflector_array,
    default_ship,
    generate_attitude,
    project_scatterers,
)

__version__ = "0.1.0"
