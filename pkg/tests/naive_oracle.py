"""Independent brute-force re-implementation of the decision statistics.

Pure-python loops over simulations, grid points and arms; intentionally
naive so it can serve as an oracle for the vectorised implementation.
"""

from dataclasses import dataclass


def _mean(xs):
    return sum(xs) / len(xs)


@dataclass
class NaiveStats:
    U: list          # [sim][k][arm]
    Ustar: list      # [sim][k]
    eu: list         # [k][arm]
    ib: list         # [sim][k][comparison]
    eib: list        # [k][comparison]
    ceac: list       # [k][comparison]
    delta_e: list    # [sim][comparison]
    delta_c: list    # [sim][comparison]
    icer: list       # [comparison], None where undefined
    best: list       # [k]
    kstar: list
    ol: list         # [sim][k]
    vi: list         # [sim][k]
    evi: list        # [k]


def naive_stats(effects, costs, ref, comparisons, kvals):
    n_sim = len(effects)
    n_int = len(effects[0])
    n_k = len(kvals)

    U = [[[kvals[i] * effects[s][t] - costs[s][t] for t in range(n_int)]
          for i in range(n_k)] for s in range(n_sim)]
    Ustar = [[max(U[s][i]) for i in range(n_k)] for s in range(n_sim)]
    eu = [[_mean([U[s][i][t] for s in range(n_sim)]) for t in range(n_int)]
          for i in range(n_k)]

    ib = [[[U[s][i][ref] - U[s][i][c] for c in comparisons]
           for i in range(n_k)] for s in range(n_sim)]
    eib = [[_mean([ib[s][i][j] for s in range(n_sim)])
            for j in range(len(comparisons))] for i in range(n_k)]
    ceac = [[sum(1 for s in range(n_sim) if ib[s][i][j] > 0) / n_sim
             for j in range(len(comparisons))] for i in range(n_k)]

    delta_e = [[effects[s][ref] - effects[s][c] for c in comparisons]
               for s in range(n_sim)]
    delta_c = [[costs[s][ref] - costs[s][c] for c in comparisons]
               for s in range(n_sim)]
    icer = []
    for j in range(len(comparisons)):
        de = _mean([delta_e[s][j] for s in range(n_sim)])
        dc = _mean([delta_c[s][j] for s in range(n_sim)])
        icer.append(None if de == 0.0 else dc / de)

    best = []
    for i in range(n_k):
        m = max(eu[i])
        best.append(ref if eu[i][ref] == m else eu[i].index(m))
    kstar = [kvals[i] for i in range(1, n_k) if best[i] != best[i - 1]]

    ol = [[Ustar[s][i] - U[s][i][best[i]] for i in range(n_k)]
          for s in range(n_sim)]
    vi = [[Ustar[s][i] - max(eu[i]) for i in range(n_k)] for s in range(n_sim)]
    evi = [_mean([ol[s][i] for s in range(n_sim)]) for i in range(n_k)]

    return NaiveStats(U=U, Ustar=Ustar, eu=eu, ib=ib, eib=eib, ceac=ceac,
                      delta_e=delta_e, delta_c=delta_c, icer=icer, best=best,
                      kstar=kstar, ol=ol, vi=vi, evi=evi)
