import json
import time

from parconn.rat import as_rat, rat_str
from parconn import involution as inv
from parconn import apparent as ap


def rq(v):
    if isinstance(v, list):
        return [rq(x) for x in v]
    return as_rat(v)


ref = json.load(open("tests/data/reference_values.json"))
vals = ref["values"]
P = {"lam": as_rat("2"), "t": as_rat("3"), "nu": as_rat("1/5")}
U = (as_rat("5"), as_rat("7"))
C = (as_rat("1"), as_rat("1"))


def check(name, got, want):
    ok = got == want
    print(("OK  " if ok else "FAIL"), name, "" if ok else (got, want))
    return ok


oks = []

z = inv.z_coord(U, P)
oks.append(check("z", z.eval_rat({}), rq(vals["z_standard"])))
w = inv.w_coord(U, P)
oks.append(check("w", w.eval_rat({}), rq(vals["w_standard"])))
ub = inv.ubar_t(U, P)
oks.append(check("ubar", ub, rq(vals["ubar_standard"])))

T = inv.t_psi_paper(U, P)
tm = [[T[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("t_matrix", tm, rq(vals["t_matrix_standard"])))

B = inv.b_matrix(U, P, check=True)
bm = [[B[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("b_matrix(+prod check)", bm, rq(vals["b_matrix_standard"])))

c0 = inv.equivariant_section_coeffs(U, P)
oks.append(check("c0", [c.eval_rat({}) for c in c0], rq(vals["c0_standard"])))

J = inv.j_matrix(U, P)
jm = [[J[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("j_matrix", jm, rq(vals["j_matrix_standard"])))

Cm = inv.c_matrix(U, P)
cm = [[Cm[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("c_matrix", cm, rq(vals["c_matrix_standard"])))

Ci = inv.c_inverse(U, P)
cim = [[Ci[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("c_inverse", cim, rq(vals["c_inverse_standard"])))

phi = inv.phi_full(U, C, P)
oks.append(check("phi z,w", [phi[0], phi[1]], [rq(vals["z_standard"]), rq(vals["w_standard"])]))
oks.append(check("kappa", [phi[2], phi[3]], rq(vals["kappa_standard"])))

oks.append(check("fixed_c1", inv.fixed_locus_c1(U, P),
                 rq(vals["fixed_locus_c1_standard"])))

t0 = time.time()
ids = inv.invariant_identities()
oks.append(check("invariant_identities", all(ids.values()), True))
print("   identities detail:", ids, f"{time.time()-t0:.2f}s")

lag = inv.verify_lagrangian()
oks.append(check("lagrangian diff/sum", (lag["difference_vanishes"],
                                         lag["sum_vanishes"]), (True, False)))

oks.append(check("local model", inv.verify_local_model(), True))

mats = ap.coefficient_matrices(U, P)
ni = [[mats.n_infty[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("n_inf", ni, rq(vals["n_inf_standard"])))
ns = [[mats.n_psi[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("n_sig", ns, rq(vals["n_sig_standard"])))

M = ap.m_matrix(U, P)
piv = M[0, 0].eval_rat({})
mn = [[M[i, j].eval_rat({}) / piv for j in range(3)] for i in range(3)]
oks.append(check("m_norm", mn, rq(vals["m_matrix_standard_normalized"])))

t0 = time.time()
Td = inv.t_psi_derived(U, P)
td = [[Td[i, j].eval_rat({}) for j in range(3)] for i in range(3)]
oks.append(check("t_derived numeric == paper", td, tm))
print(f"   t_psi_derived numeric: {time.time()-t0:.2f}s")

print("ALL OK" if all(oks) else "SOME FAILED", sum(oks), "/", len(oks))
