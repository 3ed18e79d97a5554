"""Limited-feedback interference alignment simulator for MIMO interference
networks with per-link spatial correlation and path loss."""

__version__ = "0.1.0"

from .allocation import (  # noqa: F401
    BitAllocation,
    LinkQuantStats,
    allocate_bits,
    allocation_objective,
    equal_allocation,
    rinr_upper_bound,
    scaling_bits,
    water_fill_real,
)
from .codebook import (  # noqa: F401
    BaseCodebook,
    BetaEstimate,
    QuantizationResult,
    SpatialCodebook,
    distortion_bound,
    distortion_coefficient_beta,
    gen_base_codebook,
    identity_codebook,
    quantize,
    quantize_with_refinement,
    transform_codebook,
)
from .errors import IaFeedbackError  # noqa: F401
from .evaluation import (  # noqa: F401
    BoundReport,
    ThroughputSample,
    bound_report,
    rinr,
    throughput_lb_conventional,
    throughput_lb_given_rinr,
    throughput_lb_scheme,
    throughput_limited,
    throughput_perfect,
    trial_sample,
    wishart_marginal_pdf,
)
from .harness import (  # noqa: F401
    Scheme,
    ScenarioConfig,
    SimRecord,
    run_trial,
    simulate,
    sweep,
    table1_experiment,
    toy_network,
    write_records,
)
from .ia import (  # noqa: F401
    Feasibility,
    IaOptions,
    IaResult,
    TransceiverSet,
    check_feasibility,
    compute_ia,
    leakage,
    random_transceivers,
)
from .rng import substream  # noqa: F401
from .topology import (  # noqa: F401
    ChannelRealization,
    InterferenceTopologyProfile,
    LinkStats,
    SystemDims,
    effective_rank,
    exponential_correlation,
    iid_link_stats,
    itp_from_json,
    itp_to_json,
    matrix_sqrt_psd,
    sample_channel,
    sample_random_itp,
)
