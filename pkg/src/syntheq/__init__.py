"""Deterministic contract engine: exact derivative payoffs, cash-netting
settlement, put-call parity checks and constructive-trade detection."""

from .instruments import (
    ContractError,
    ExerciseStyle,
    Forward,
    InsiderRelations,
    InsiderRole,
    Instrument,
    Loan,
    Option,
    OptionKind,
    Party,
    Portfolio,
    Position,
    SettlementMode,
    Side,
    Stock,
    Swap,
    classify_insider,
    describe,
    position,
    validate_contract,
)
from .money import (
    CurrencyMismatchError,
    DEFAULT_CURRENCY,
    ExactnessError,
    Money,
    Rate,
    format_money,
    format_rate,
    make_rate,
    mul_exact,
    parse_money,
    parse_rate,
)
from .parity import (
    ConditionReport,
    DetectionVerdict,
    EquivalenceResult,
    PayoffProfile,
    ProfileError,
    TitleAudit,
    VerdictKind,
    check_parity_conditions,
    detect_constructive_trade,
    economic_equivalence,
    payoff_profile,
    synthesize_loan,
    synthesize_long_stock,
    title_transfer_audit,
)
from .payoff import (
    Payoff,
    PayoffError,
    PriceScenario,
    direct_trade_gain,
    instrument_value,
    loan_maturity_value,
    payoff_call,
    payoff_forward,
    payoff_put,
    payoff_stock,
    payoff_swap,
    portfolio_payoff,
)
from .settlement import (
    CompensationRequisiteError,
    Deliver,
    ExerciseDecision,
    LedgerEntry,
    NetPosition,
    NovationError,
    Pay,
    SettlementError,
    SettlementLedger,
    SettlementResult,
    SettlementState,
    StateMachineError,
    exercise_decision,
    legal_compensation,
    novate_to_cash,
    open_ledger,
    perfect,
    settle,
    settle_physical_purchase,
)

__version__ = "0.1.0"
