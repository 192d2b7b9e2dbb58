# Writes an AC-OPF solution as a JSON fixture: bus voltages in p.u./rad and
# generator dispatch and in-service branch flows (from and to end) in p.u. Usage: ac_point.py case.m out.json
import json, sys
import numpy as np
from pypower.api import runopf, ppoption

sys.argv, args = sys.argv[:1], sys.argv[1:]
exec(open(__file__.replace('ac_point.py', 'acopf.py')).read().split('ppc = load')[0])

ppc = load(args[0])
r = runopf(ppc, ppoption(VERBOSE=0, OUT_ALL=0, OPF_VIOLATION=1e-10, PDIPM_FEASTOL=1e-10, PDIPM_GRADTOL=1e-10))
assert r['success']
base = r['baseMVA']
va = np.deg2rad(r['bus'][:, 8])
ids = {int(b): k for k, b in enumerate(r['bus'][:, 0])}
for br in r['branch']:
    if br[10] == 0:
        continue
    d = va[ids[int(br[0])]] - va[ids[int(br[1])]]
    assert np.deg2rad(br[11]) - 1e-9 <= d <= np.deg2rad(br[12]) + 1e-9, 'angle limit violated'
gen = r['gen'][r['gen'][:, 7] > 0]
out = {
    'case': args[0],
    'objective': r['f'],
    'bus': [{'id': int(b[0]), 'vm': b[7], 'va': float(a)} for b, a in zip(r['bus'], va)],
    'gen': [{'bus': int(g[0]), 'pg': g[1] / base, 'qg': g[2] / base} for g in gen],
    'branch': [{'p_fr': b[13] / base, 'q_fr': b[14] / base, 'p_to': b[15] / base, 'q_to': b[16] / base}
               for b in r['branch'] if b[10] != 0],
}
json.dump(out, open(args[1], 'w'), indent=1)
print(args[0], r['f'])
