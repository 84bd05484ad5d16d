"""Independent brute-force reference implementations used to cross-check metrics.

Deliberately naive: straight exhaustive counting from the definitions,
sharing no code with the library implementations.
"""

from __future__ import annotations


def brute_market_share(records, agents, t, w):
    lo = t - w + 1
    if lo < 1:
        lo = 1
    total = 0
    for rec in records:
        if lo <= rec.t <= t:
            total += 1
    result = {}
    for agent in agents:
        hits = 0
        for rec in records:
            if lo <= rec.t <= t and agent in rec.trajectory:
                hits += 1
        result[agent] = hits / total
    return result


def brute_retention_user(records, user, agent, m):
    mine = []
    for rec in records:
        if rec.user == user:
            mine.append(rec)
    adoption = None
    for i in range(len(mine)):
        if agent in mine[i].trajectory:
            adoption = i
            break
    if adoption is None:
        return None
    kept = 0
    looked = 0
    i = adoption + 1
    while i < len(mine) and looked < m:
        looked += 1
        if agent in mine[i].trajectory:
            kept += 1
        i += 1
    if looked == 0:
        return None
    return kept / looked


def brute_retention_agent(records, agent, m):
    users = []
    for rec in records:
        if rec.user not in users:
            users.append(rec.user)
    values = []
    for user in users:
        tried = False
        for rec in records:
            if rec.user == user and agent in rec.trajectory:
                tried = True
                break
        if not tried:
            continue
        v = brute_retention_user(records, user, agent, m)
        if v is not None:
            values.append(v)
    if not values:
        return None
    return sum(values) / len(values)


def brute_dominance_gap(shares, target):
    top_share = None
    for a in shares:
        if top_share is None or shares[a] > top_share:
            top_share = shares[a]
    tied = sorted(a for a in shares if shares[a] == top_share)
    leader = tied[0]
    return shares[leader] - target[leader]


def brute_kendall_tau(ranking_a, ranking_b):
    n = len(ranking_a)
    concordant = 0
    discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            x, y = ranking_a[i], ranking_a[j]
            if ranking_b.index(x) < ranking_b.index(y):
                concordant += 1
            else:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)
