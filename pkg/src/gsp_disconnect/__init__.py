"""Detection and identification of edge disconnections from graph-filtered signals."""

from .detectors import (
    DetectorConfig,
    FrequencyEnergies,
    HypothesisCapError,
    LrtStatistic,
    bmsd,
    enumerate_hypotheses,
    frequency_energies,
    gmrf_lrt_edge_sum,
    gmrf_lrt_local_trace,
    gmrf_lrt_noiseless,
    gmrf_penalty_local,
    local_lrt,
    lrt_spectral,
    lrt_statistic,
    ml_decision,
    ml_scores,
    naive_smoothness,
    smsd,
)
from .graph import (
    DisconnectionHypothesis,
    GraphError,
    LaplacianView,
    WeightedGraph,
    apply_hypothesis,
    build_graph,
    diameter,
    is_connected,
    laplacian,
    load_graph,
    neighborhood,
    path_edge_set,
    single_edge_perturbation,
    watts_strogatz,
)
from .greedy import GreedyConfig, greedy_identify, greedy_identify_local, phi1, phi2, update_search_set
from .signals import (
    SampleCovariance,
    SignalBatch,
    SignalModel,
    generate,
    log_likelihood,
    model_covariance,
    sample_covariance,
)
from .spectral import (
    GraphFilter,
    dirichlet_energy,
    filter_matrix,
    gft,
    igft,
    log_pseudo_det,
    pseudo_det,
    pseudo_inverse,
    smoothness_ratio,
    transfer,
)

__version__ = "0.1.0"
