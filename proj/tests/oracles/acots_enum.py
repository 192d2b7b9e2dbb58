import sys, itertools, numpy as np, networkx as nx
from pypower.api import runopf, ppoption
sys.argv, case = sys.argv[:1], sys.argv[1]
exec(open('acopf.py').read().split('ppc = load')[0])
ppc = load(case); nl = len(ppc['branch']); best = (1e30, None)
for off in itertools.product([0, 1], repeat=nl):
    if sum(off) == 0 and False: pass
    p = {k: (v.copy() if hasattr(v, 'copy') else v) for k, v in ppc.items()}
    p['branch'][:, 10] = 1 - np.array(off)
    g = nx.MultiGraph(); g.add_nodes_from(p['bus'][:, 0]); g.add_edges_from([tuple(b[:2]) for b in p['branch'] if b[10] > 0])
    if not nx.is_connected(g): continue
    r = runopf(p, ppoption(VERBOSE=0, OUT_ALL=0))
    if r['success'] and r['f'] < best[0]: best = (r['f'], off)
print(case, best)
