"""Independent single-threaded recount oracles.

Deliberately naive: plain loops, Fraction-based rounding, no shared code
with the processor implementations they check.
"""

from __future__ import annotations

from blocklens.classify import classify_action


def halfup(numerator: int, denominator: int, places: int) -> str:
    """numerator/denominator as a fixed-point string, rounded half-up."""
    scale = 10**places
    q, r = divmod(numerator * scale, denominator)
    if 2 * r >= denominator:
        q += 1
    whole, frac = divmod(q, scale)
    return f"{whole}.{frac:0{places}d}" if places else str(whole)


def percent_halfup(count: int, total: int, places: int = 1) -> str:
    return halfup(count * 100, total, places) if total else "0." + "0" * places


def count_transactions(blocks) -> int:
    total = 0
    for b in blocks:
        total += b.tx_count
    return total


def count_transactions_over_time(blocks, duration_s: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for b in blocks:
        w = b.timestamp - (b.timestamp % duration_s)
        out[w] = out.get(w, 0) + b.tx_count
    return out


def _key_of(action, by: str, rules):
    if by == "category":
        return classify_action(rules, action).value
    return getattr(action, by)


def group_actions(blocks, by: str, rules=None) -> dict[str, int]:
    out: dict[str, int] = {}
    for b in blocks:
        for a in b.actions:
            k = _key_of(a, by, rules)
            out[k] = out.get(k, 0) + 1
    return out


def group_actions_over_time(blocks, by: str, duration_s: int, rules=None) -> dict[int, dict[str, int]]:
    out: dict[int, dict[str, int]] = {}
    for b in blocks:
        w = b.timestamp - (b.timestamp % duration_s)
        bucket = out.setdefault(w, {})
        for a in b.actions:
            k = _key_of(a, by, rules)
            bucket[k] = bucket.get(k, 0) + 1
    return out


def top_accounts(blocks, direction: str, n: int) -> list[dict]:
    counts: dict[str, int] = {}
    parties: dict[str, set] = {}
    for b in blocks:
        for a in b.actions:
            acct = a.sender if direction == "sent" else a.receiver
            other = a.receiver if direction == "sent" else a.sender
            counts[acct] = counts.get(acct, 0) + 1
            if other:
                parties.setdefault(acct, set()).add(other)
    order = sorted(counts, key=lambda acct: (-counts[acct], acct))[:n]
    rows = []
    for acct in order:
        unique = len(parties.get(acct, ()))
        avg = halfup(counts[acct], unique, 2) if unique else "0.00"
        rows.append(
            {
                "account": acct,
                "count": counts[acct],
                "unique_counterparties": unique,
                "avg_per_counterparty": avg,
            }
        )
    return rows


def distribution(blocks, rules) -> list[dict]:
    counts: dict[tuple[str, str], int] = {}
    total = 0
    for b in blocks:
        for a in b.actions:
            k = (classify_action(rules, a).value, a.name)
            counts[k] = counts.get(k, 0) + 1
            total += 1
    rows = []
    for (category, name), count in sorted(counts.items(), key=lambda kv: (kv[0][0], -kv[1], kv[0][1])):
        rows.append(
            {
                "category": category,
                "name": name,
                "count": count,
                "percent": percent_halfup(count, total),
            }
        )
    return rows


def max_window(series: list[tuple[int, int]]) -> tuple[int, int]:
    """(window_start, count) of the max-count window, earliest on ties."""
    best = None
    for start, count in sorted(series):
        if best is None or count > best[1]:
            best = (start, count)
    assert best is not None
    return best


def avg_tps_2dp(total: int, seconds: int) -> str:
    return halfup(total, seconds, 2)
