"""Behavioral-group mining from wireless LAN association traces.

Pipeline: association records -> per-user normalized association matrices ->
behavior summaries (weighted average, dominant-mode centroid, eigen-behavior
vectors) -> pairwise behavioral distances (AMVD on raw matrices, or the cheap
eigen-behavior similarity distance) -> average-linkage clustering -> group
validation (power scatter, cross significance, rank-size power law, Jaccard)
-> group-cast message simulation over the remaining trace half.
"""

__version__ = "0.1.0"

from .cluster import Partition, agglomerate, distance_cdfs
from .distances import (
    DistanceMatrix,
    amvd,
    amvd_distance,
    amvd_distance_matrix,
    eigen_distance,
    eigen_distance_matrix,
    eigen_sets_for,
    manhattan,
    normalize_sims,
    normalized_sim_table,
    sim,
    sim_matrix,
    summary_l1_distance,
)
from .groups import (
    CrossSignificance,
    GroupProfile,
    ScatterPoint,
    cross_significance,
    group_power_scatter,
    group_profiles,
    jaccard,
    joint_matrix,
    partition_from_labels,
    rank_size_fit,
    top_groups_share,
)
from .pipeline import PipelineResult, build_distance_matrix, cluster_population, run_pipeline
from .profilecast import (
    Encounter,
    Message,
    SimConfig,
    SimResult,
    SimulationOutcome,
    build_messages,
    compare_schemes,
    extract_encounters,
    simulate,
    split_trace,
)
from .summaries import (
    EigenBehaviorSet,
    ModeClustering,
    behavioral_modes,
    centroid_first_mode,
    eigen_behaviors,
    modal_class,
    onavg,
    power_captured,
    significance,
    summary_table,
)
from .synth import (
    ONLINE_SECONDS,
    GroupSpec,
    SynthSpec,
    generate,
    single_location_modes,
    spec_from_json,
    spec_to_json_dict,
)
from .trace import (
    DAY_SECONDS,
    AssociationMatrix,
    AssociationRecord,
    TraceConfig,
    aggregate_locations,
    build_location_index,
    build_matrices,
    build_matrix,
    load_location_map,
    load_records,
    online_slot_count,
    records_by_user,
)

__all__ = [name for name in dir() if not name.startswith("_")]
