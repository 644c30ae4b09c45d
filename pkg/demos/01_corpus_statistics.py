#!/usr/bin/env python3
"""Corpus statistics: users, lengths, tokens, vocabulary, truncation.

Builds a tiny interaction corpus by hand, reports its statistics, then shows
how capping sequences at a maximum length (keeping the most recent suffix)
changes the numbers, and what the whole-sequence distribution entropy says
about how repetitive the user population is.
"""

import math

from perflaw import (
    InteractionSequence,
    compute_stats,
    sequence_distribution_entropy,
    truncate,
)

corpus = [
    InteractionSequence("alice", (5, 7, 5, 2, 9, 9, 4)),
    InteractionSequence("bob", (7, 7, 7)),
    InteractionSequence("carol", (5, 7, 5, 2, 9, 9, 4)),   # same history as alice
    InteractionSequence("dave", (1, 2, 3, 4, 5, 6, 7, 8, 9, 10)),
]

print("=== corpus ===")
for seq in corpus:
    print(f"  {seq.user_id:<6} {list(seq.items)}")

stats = compute_stats(corpus)
print("\n=== statistics ===")
print(f"  users          {stats.num_users}")
print(f"  longest        {stats.s_max}")
print(f"  mean length    {stats.s_mean:.2f}")
print(f"  tokens         {stats.tokens}")
print(f"  distinct items {stats.vocab}")

print("\n=== truncation keeps the most recent items ===")
for cap in (5, 3, 1):
    capped = truncate(corpus, cap)
    s = compute_stats(capped)
    print(f"  cap {cap}: dave -> {list(capped[3].items)}, tokens {s.tokens}")

h = sequence_distribution_entropy(corpus)
print("\n=== whole-sequence distribution entropy ===")
print(f"  H = {h:.4f} nats (0 = every user identical, "
      f"ln(users) = {math.log(stats.num_users):.4f} = all distinct)")
print("  alice and carol share a history, so H sits below the maximum.")
