"""beliefmarket: belief markets over logical sentences.

The engine constructs computable day-indexed pricings of propositional
sentences that a configured pool of continuous trading strategies cannot
exploit: every day carries a certificate that the pool's aggregate trade has
max plausible world value at most that day's epsilon, where plausibility is
truth in some world consistent with everything deduced so far.
"""

from .deduction import (
    CompositeProcess,
    DeductiveProcess,
    DiagonalRule,
    PriceFactRule,
    ReflectiveRule,
    ScriptedProcess,
    SentenceStream,
    StreamProcess,
    bin_rules,
    load_script,
    parse_script,
    reflective_extend,
    run_bounded,
    step,
    theorem_stream,
)
from .errors import (
    ConfigError,
    EngineError,
    EnumerationCapError,
    EvaluationError,
    InconsistentFragmentError,
    NestednessError,
    ResolutionFailureError,
    ScriptError,
    SentenceSyntaxError,
    StrategyError,
    SupportError,
    UncoveredAtomError,
)
from .harness import (
    ExperimentReport,
    Scenario,
    Variable,
    expectation,
    indicator,
    load_scenario,
    parse_scenario,
)
from .inductor import (
    DayCertificate,
    InductorConfig,
    MarketTrace,
    PoolMember,
    TraderPool,
    budget_scale,
    find_prices,
    firm_trade,
    run_inductor,
    support_sentences,
)
from .logic import (
    Atom,
    FragmentContext,
    Sentence,
    TheoryFragment,
    World,
    atoms_of,
    eval_sentence,
    is_consistent,
    parse_sentence,
    plausible_worlds,
    render,
)
from .trading import (
    Holdings,
    Trade,
    Trader,
    apply_trade,
    evaluate_exploitation,
    eval_feature,
    instantiate_trade,
    parse_strategy,
    plausible_value_range,
    world_value,
)

__version__ = "0.1.0"
