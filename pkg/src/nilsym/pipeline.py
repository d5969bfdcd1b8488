"""The analysis pipeline behind ``nilsym analyze`` and ``nilsym fuzz``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dataset import DataSet, build_nilpotent, compact_split, recover_data_set, validate_data_set
from .document import InputDocument, to_document
from .errors import NilsymError, TheoremMismatch
from .geometry import flat_factor_analysis
from .isotropy import isotropy_split
from .liealg import MetricLieAlgebra, is_abelian, is_two_step_nilpotent, j_map, skew_derivations
from .natred import is_naturally_reductive
from .numkernel import DEFAULT_TOL, TolerancePolicy, restrict_form, signature
from .repdecomp import invariant_decomposition, kernel_decomposition
from .symmetry import (
    ISOTROPY_ASSUMPTION,
    fixed_point_subspace,
    nabla_killing_at_e,
    transvection_for_central,
    transvection_space,
    verify_main_theorem,
)

__all__ = ["Analysis", "analyze", "analyze_data_set", "analyze_lie_algebra", "fuzz_invariants"]


@dataclass
class Analysis:
    report: dict
    exit_code: int = 0
    failures: list = field(default_factory=list)


def _error(exc: Exception) -> dict:
    return {"error": type(exc).__name__, "message": str(exc)}


def _tol_dict(tol: TolerancePolicy) -> dict:
    return {"abs_tol": tol.abs_tol, "rel_tol": tol.rel_tol, "rank_tol_factor": tol.rank_tol_factor}


def _geometry_stages(L: MetricLieAlgebra, rep: dict, res: dict, tol: TolerancePolicy) -> None:
    try:
        rep["flat_factor"] = flat_factor_analysis(L, tol).as_dict()
    except NilsymError as exc:
        rep["flat_factor"] = _error(exc)
    try:
        cert = is_naturally_reductive(L, tol)
        rep["natred"] = cert.as_dict()
        if cert.tau is not None:
            res["tau_relation"] = cert.tau.relation_residual
            res["tau_skew"] = cert.tau.skew_residual
    except NilsymError as exc:
        rep["natred"] = _error(exc)


def _data_set_stages(d: DataSet, rep: dict, res: dict, seed: int, tol: TolerancePolicy, an: Analysis) -> None:
    try:
        dec = invariant_decomposition(d, tol, seed=seed)
        block = dec.as_dict()
        res["block_invariance"] = dec.invariance_residual(d.pi.matrices)
        res["block_orthogonality"] = dec.orthogonality_residual()
        block["lorentzian_blocks"] = len(dec.lorentzian_blocks())
        kd = [kernel_decomposition(d, z, dec, tol).as_dict() for z in np.eye(d.g_dim)]
        block["kernels"] = kd
        rep["decomposition"] = block
    except NilsymError as exc:
        rep["decomposition"] = _error(exc)
    split = None
    try:
        split = isotropy_split(d, tol)
        rep["isotropy"] = split.as_dict()
    except TheoremMismatch as exc:
        rep["isotropy"] = _error(exc)
        an.exit_code = 1
        an.failures.append("isotropy")
    except NilsymError as exc:
        rep["isotropy"] = _error(exc)
    lorentz = d.is_lorentzian(tol)
    try:
        mt = verify_main_theorem(d, tol, strict=False, split=split)
        sym = mt.as_dict()
        sym["lorentzian"] = lorentz
        rep["symmetry"] = sym
        res["transvection_kernel"] = mt.transvection_residual
        if lorentz and not mt.ok:
            an.exit_code = 1
            an.failures.append("main_theorem")
            sym["error"] = "TheoremMismatch"
    except NilsymError as exc:
        rep["symmetry"] = _error(exc)
    try:
        L = build_nilpotent(d, tol, check=False)
        cb = compact_split(d.g, tol).c.canonical
        worst = 0.0
        for a in range(cb.shape[1]):
            pair = transvection_for_central(d, cb[:, a], tol)
            worst = max(worst, float(np.max(np.abs(nabla_killing_at_e(L, pair, tol)), initial=0.0)))
        res["central_transvection"] = worst
    except NilsymError as exc:
        res["central_transvection"] = _error(exc)


def analyze_data_set(d: DataSet, seed: int = 0, tol: TolerancePolicy = DEFAULT_TOL) -> Analysis:
    an = Analysis({})
    rep = an.report
    res: dict = {}
    val = validate_data_set(d, tol)
    rep["validation"] = val.as_dict()
    if not val.valid:
        an.exit_code = 1
        an.failures.append("validation")
        return an
    L = build_nilpotent(d, tol, check=False)
    _geometry_stages(L, rep, res, tol)
    _data_set_stages(d, rep, res, seed, tol, an)
    rep["residuals"] = res
    return an


def analyze_lie_algebra(L: MetricLieAlgebra, seed: int = 0, tol: TolerancePolicy = DEFAULT_TOL) -> Analysis:
    an = Analysis({})
    rep = an.report
    res: dict = {}
    two = is_two_step_nilpotent(L, tol)
    rep["validation"] = {
        "valid": two,
        "two_step_nilpotent": two,
        "abelian": is_abelian(L, tol),
        "signature": signature(L.metric, tol).as_dict(),
    }
    if not two:
        an.exit_code = 1
        an.failures.append("validation")
        return an
    _geometry_stages(L, rep, res, tol)
    recovered = None
    if rep.get("natred", {}).get("verdict") and rep["natred"].get("j_injective"):
        try:
            recovered = recover_data_set(L, tol)
            if not validate_data_set(recovered, tol).valid:
                recovered = None
        except NilsymError:
            recovered = None
    rep["recovered_data_set"] = recovered is not None
    if recovered is not None:
        _data_set_stages(recovered, rep, res, seed, tol, an)
    else:
        # no data-set presentation: h^aut and the symmetry subspace straight from L
        try:
            haut = skew_derivations(L, tol)
            ts = transvection_space(L, haut, tol)
            f0 = fixed_point_subspace(L, haut, tol)
            rep["isotropy"] = {"total_dim": len(haut), "direct_dim": len(haut)}
            rep["symmetry"] = {
                "index_of_symmetry": ts.index,
                "dims": {"s_e": ts.index, "F0": f0.dim},
                "s_e_equals_F0": ts.s_e.equals(f0),
                "s_e_signature": ts.s_e_signature.as_dict(),
                "assumption": ISOTROPY_ASSUMPTION,
            }
            res["transvection_kernel"] = ts.residual
        except NilsymError as exc:
            rep["symmetry"] = _error(exc)
    rep["residuals"] = res
    return an


def analyze(doc: InputDocument, seed: int = 0, tol: TolerancePolicy = DEFAULT_TOL) -> Analysis:
    """Full report for an input document; never raises on a schema-valid document."""
    tol = doc.policy(tol)
    try:
        if doc.kind == "data_set":
            an = analyze_data_set(doc.payload, seed, tol)
        else:
            an = analyze_lie_algebra(doc.payload, seed, tol)
    except NilsymError as exc:
        an = Analysis({"fatal": _error(exc)}, 1, ["fatal"])
    an.report.update({
        "input": to_document(doc.payload, doc.name),
        "seed": int(seed),
        "tolerance": _tol_dict(tol),
        "version": __version__,
        "failures": list(an.failures),
    })
    return an


def fuzz_invariants(d: DataSet, seed: int = 0, tol: TolerancePolicy = DEFAULT_TOL) -> list:
    """Theorem-level invariants for one random data set; returns failed check names."""
    an = analyze_data_set(d, seed, tol)
    rep = an.report
    bad = list(an.failures)
    if not rep.get("validation", {}).get("valid"):
        return bad or ["validation"]
    res = rep.get("residuals", {})
    if not rep.get("natred", {}).get("verdict"):
        bad.append("natred")
    if rep.get("flat_factor", {}).get("verdict") != "no_flat_factor":
        bad.append("flat_factor")
    dec = rep.get("decomposition", {})
    if "error" in dec or res.get("block_invariance", 1.0) > 1e-9 or res.get("block_orthogonality", 1.0) > 1e-9:
        bad.append("decomposition")
    elif d.v_metric.dim and signature(d.v_metric, tol).kind == "lorentzian" and dec.get("lorentzian_blocks") != 1:
        bad.append("decomposition")
    elif not all(k["nondegenerate"] for k in dec.get("kernels", [])):
        bad.append("kernel_nondegenerate")
    sym = rep.get("symmetry", {})
    if not (sym.get("s_e_equals_F0_equals_c") and sym.get("s_e_nondegenerate")):
        bad.append("main_theorem")
    ct = res.get("central_transvection")
    if not isinstance(ct, float) or ct > 1e-10:
        bad.append("central_transvection")
    # j must reproduce pi on the built algebra
    try:
        L = build_nilpotent(d, tol, check=False)
        jm = j_map(L, tol)
        zb = jm.center_basis.basis[: d.g_dim]
        expect = [sum(zb[a, b] * d.pi.matrices[a] for a in range(d.g_dim)) for b in range(zb.shape[1])]
        if max(float(np.max(np.abs(x - y))) for x, y in zip(jm.matrices, expect)) > 1e-8:
            bad.append("j_equals_pi")
    except NilsymError:
        bad.append("j_equals_pi")
    return sorted(set(bad))
