"""Stackelberg punishment solver and one-lane-bridge negotiation testbed."""

from .bridge import (
    BLOCK,
    BULLY,
    HUMAN_CLOSE,
    MIXTURE,
    SDC_CLOSE,
    YIELD,
    BridgeConfig,
    BridgeConfigError,
    BridgeSolution,
    MoveRules,
    PlanCursor,
    RegimeReport,
    build_bridge_tree,
    count_bridge_tree,
    solve_bridge,
)
from .driving import (
    COOPERATIVE,
    PUNISHING,
    BullyVerdict,
    LiveState,
    PunishingDriver,
    advance,
    cautious_policy,
    detect_bully,
    episode_reward,
    horn_signal,
    next_mode,
    punishing_policy,
    start_state,
)
from .frontier import (
    Frontier,
    FrontierMap,
    FrontierPoint,
    FrontierSegment,
    InfeasibleCap,
    TargetPoint,
    clip_frontier,
    export_frontier_csv,
    extract_equilibrium,
    extract_punishment,
    leaf_frontier,
    merge_follower,
    merge_leader,
    prune_envelope,
    sigma_thresholds,
    solve_frontier,
    unroll_policy,
)
from .games import (
    GameTree,
    Node,
    Policy,
    PolicyError,
    TreeFormatError,
    best_response,
    evaluate_policy,
    export_tree,
    import_tree,
    minimax_follower_value,
    random_tree,
    validate_tree,
)
from .harness import (
    CONTROL,
    EXPERIMENTAL,
    AdaptiveHuman,
    AlwaysBullyHuman,
    AlwaysFairHuman,
    BestResponseHuman,
    EpisodeEngine,
    EpisodeRecord,
    PersistenceCurve,
    ScriptedHuman,
    SessionRecord,
    bully_persistence,
    export_episodes_jsonl,
    make_human,
    read_episodes_jsonl,
    run_episode,
    run_session,
)
from .oracle import (
    BudgetExceededError,
    PureInfeasibleError,
    enumerate_pure_leader,
    grid_search_leader,
    verify_point,
)
from .stats import ContingencyTable, fisher_exact

__version__ = "0.1.0"
