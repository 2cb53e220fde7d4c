"""Multi-chain block archive fetching and transaction analytics for
EOSIO, Tezos and XRPL."""

__version__ = "0.1.0"
