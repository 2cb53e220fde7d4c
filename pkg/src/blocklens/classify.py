"""Action classification.

Each chain ships a default rule set: exact (receiver, name) rules take
precedence over per-contract labels, which take precedence over the OTHER
fallback. The EOSIO contract labels live in an editable JSON data file so
the manual labeling stays auditable and extensible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import ChainMismatch
from .model import Action, ActionCategory, ChainId

#: Wildcard receiver for name-only rules (XRPL transaction types, Tezos
#: operation kinds).
ANY_RECEIVER = "*"

_C = ActionCategory

_XRPL_NAME_RULES: dict[str, ActionCategory] = {
    "Payment": _C.PEER_TO_PEER,
    "EscrowFinish": _C.PEER_TO_PEER,
    "TrustSet": _C.ACCOUNT,
    "AccountSet": _C.ACCOUNT,
    "SignerListSet": _C.ACCOUNT,
    "SetRegularKey": _C.ACCOUNT,
    "DepositPreauth": _C.ACCOUNT,
    "OfferCreate": _C.DEX,
    "OfferCancel": _C.DEX,
}

_TEZOS_NAME_RULES: dict[str, ActionCategory] = {
    "endorsement": _C.CONSENSUS,
    "seed_nonce_revelation": _C.CONSENSUS,
    "double_baking_evidence": _C.CONSENSUS,
    "double_endorsement_evidence": _C.CONSENSUS,
    "transaction": _C.PEER_TO_PEER,
    "reveal": _C.ACCOUNT,
    "origination": _C.ACCOUNT,
    "activate_account": _C.ACCOUNT,
    "delegation": _C.OTHER,
    "ballot": _C.OTHER,
    "proposals": _C.OTHER,
}

# System-contract actions with fixed receivers.
_EOSIO_EXACT_RULES: dict[tuple[str, str], ActionCategory] = {
    ("eosio.token", "transfer"): _C.TOKEN,
    ("eosio", "newaccount"): _C.ACCOUNT,
    ("eosio", "bidname"): _C.ACCOUNT,
    ("eosio", "deposit"): _C.ACCOUNT,
    ("eosio", "linkauth"): _C.ACCOUNT,
    ("eosio", "updateauth"): _C.ACCOUNT,
    ("eosio", "delegatebw"): _C.OTHER,
    ("eosio", "undelegatebw"): _C.OTHER,
    ("eosio", "buyrambytes"): _C.OTHER,
    ("eosio", "rentcpu"): _C.OTHER,
    ("eosio", "voteproducer"): _C.OTHER,
    ("eosio", "buyram"): _C.OTHER,
}


@dataclass(frozen=True)
class ClassificationRules:
    """Deterministic category lookup for one chain."""

    chain: ChainId
    exact_rules: dict[tuple[str, str], ActionCategory] = field(default_factory=dict)
    contract_labels: dict[str, ActionCategory] = field(default_factory=dict)
    default: ActionCategory = ActionCategory.OTHER


def load_contract_labels() -> dict[str, ActionCategory]:
    """EOSIO account -> category labels from the bundled data file."""
    text = resources.files("blocklens.data").joinpath("eosio_contract_labels.json").read_text()
    raw = json.loads(text)
    return {account: ActionCategory(cat) for account, cat in raw.items()}


def default_rules(chain: ChainId) -> ClassificationRules:
    """The shipped rule set for a chain."""
    if chain is ChainId.XRPL:
        exact = {(ANY_RECEIVER, name): cat for name, cat in _XRPL_NAME_RULES.items()}
        return ClassificationRules(chain=chain, exact_rules=exact)
    if chain is ChainId.TEZOS:
        exact = {(ANY_RECEIVER, name): cat for name, cat in _TEZOS_NAME_RULES.items()}
        return ClassificationRules(chain=chain, exact_rules=exact)
    return ClassificationRules(
        chain=ChainId.EOSIO,
        exact_rules=dict(_EOSIO_EXACT_RULES),
        contract_labels=load_contract_labels(),
    )


def classify_action(rules: ClassificationRules, action: Action) -> ActionCategory:
    """Total, deterministic category lookup.

    Precedence: exact (receiver, name) rule, then (*, name) rule, then the
    receiver's contract label, then the default.
    """
    if rules.chain is not action.chain:
        raise ChainMismatch(
            f"rules are for {rules.chain.value}, action is {action.chain.value}"
        )
    cat = rules.exact_rules.get((action.receiver, action.name))
    if cat is not None:
        return cat
    cat = rules.exact_rules.get((ANY_RECEIVER, action.name))
    if cat is not None:
        return cat
    cat = rules.contract_labels.get(action.receiver)
    if cat is not None:
        return cat
    return rules.default


def category_group(category: ActionCategory) -> str:
    """Coarse display group: peer-to-peer, account, or other.

    Token transfers are value transfers, so TOKEN lands in peer-to-peer;
    consensus, DEX, gambling and the fallback all land in other.
    """
    if category in (ActionCategory.PEER_TO_PEER, ActionCategory.TOKEN):
        return "peer-to-peer"
    if category is ActionCategory.ACCOUNT:
        return "account"
    return "other"
