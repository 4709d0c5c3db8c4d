"""Command-line interface: generate instances, prove, verify, experiment.

Exit codes are the machine contract: 0 = accepted, 1 = rejected,
2 = usage or parameter error.  Stdout is for humans.
"""

from __future__ import annotations

import json
import os
import random
import sys

import click

from .ff import DEFAULT_MODULUS, PrimeField
from .instances import (
    planted_member,
    planted_rank,
    rand_polymat,
)
from .oracles import (
    det_bareiss,
    hermite_form,
    kernel_basis_left,
    popov_form,
    rank_and_profile,
    saturation_basis,
)
from .protocols import ProverGaveUp, run_protocol, verify_transcript, PROTOCOL_IDS
from .transcript import (
    MODE_FIAT_SHAMIR,
    MODE_INTERACTIVE,
    DigestMismatchError,
    PolyMatrixPayload,
    PolyVectorPayload,
    ProtocolParams,
    Transcript,
    TranscriptError,
    payload_from_json,
    payload_to_json,
    payload_to_polymat,
    payload_to_polyvec,
    polymat_to_payload,
    polyvec_to_payload,
)

INSTANCE_FORMAT = "polycert-instance/v1"


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise click.UsageError(f"environment variable {name} must be an integer")


@click.group()
def main():
    """Interactive certificates for polynomial matrix computations."""


def _load_instance(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot read instance file: {exc}")
    if doc.get("format") != INSTANCE_FORMAT:
        raise click.UsageError("not a polycert instance file")
    field = PrimeField(int(doc["p"]))
    objects = {}
    for name, payload_doc in doc.get("objects", {}).items():
        payload = payload_from_json(payload_doc)
        if isinstance(payload, PolyMatrixPayload):
            objects[name] = payload_to_polymat(field, payload)
        elif isinstance(payload, PolyVectorPayload):
            objects[name] = payload_to_polyvec(field, payload)
        else:
            objects[name] = payload
    return field, doc, objects


@main.command()
@click.option("--kind", type=click.Choice(
    ["random", "planted-rank", "planted-membership", "planted-normal-form"]),
    default="random", show_default=True)
@click.option("--m", "m", type=int, default=4, show_default=True)
@click.option("--n", "n", type=int, default=4, show_default=True)
@click.option("--d", "d", type=int, default=2, show_default=True)
@click.option("--r", "r", type=int, default=None, help="planted rank")
@click.option("--modulus", type=int, default=None, help="prime field modulus")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen(kind, m, n, d, r, modulus, seed, out):
    """Generate a seeded instance file with its ground-truth witness."""
    p = modulus if modulus is not None else _env_int("POLYCERT_MODULUS", DEFAULT_MODULUS)
    seed = seed if seed is not None else _env_int("POLYCERT_SEED", 0)
    try:
        field = PrimeField(p)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if m < 1 or n < 1 or d < 0:
        raise click.UsageError("need m, n >= 1 and d >= 0")
    rng = random.Random(seed)
    objects = {}
    witness = {}
    if kind == "random":
        a = rand_polymat(rng, field, m, n, d)
        # B is n x n: composable with A both as A.B and as a same-width matrix
        b = rand_polymat(rng, field, n, n, d)
        objects = {"A": polymat_to_payload(a), "B": polymat_to_payload(b)}
    elif kind == "planted-rank":
        if r is None or not 0 <= r <= min(m, n):
            raise click.UsageError("planted-rank needs --r in [0, min(m, n)]")
        a = planted_rank(rng, field, m, n, r, d)
        objects = {"A": polymat_to_payload(a)}
        witness = {"rank": r}
    elif kind == "planted-membership":
        a, v, q = planted_member(rng, field, m, n, d)
        objects = {"A": polymat_to_payload(a), "v": polyvec_to_payload(v)}
        witness = {"combination": payload_to_json(polyvec_to_payload(q))}
    elif kind == "planted-normal-form":
        a = rand_polymat(rng, field, m, n, d)
        h, _ = hermite_form(a)
        objects = {"A": polymat_to_payload(a), "H": polymat_to_payload(h)}
        witness = {"hermite_rows": h.m}
    doc = {
        "format": INSTANCE_FORMAT,
        "kind": kind,
        "p": str(p),
        "seed": seed,
        "m": m,
        "n": n,
        "d": d,
        "objects": {k: payload_to_json(v) for k, v in objects.items()},
        "witness": witness,
    }
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    click.echo(f"wrote {kind} instance to {out}")


def _publics_for(protocol, field, objects, prover_seed):
    """Assemble protocol public inputs, computing certified objects on demand.

    Computing the result is the Prover's job, so filling in e.g. the Hermite
    form with the oracle here is exactly the prove-side workflow.
    """
    need = lambda name: objects.get(name)
    a = need("A")
    if a is None:
        raise click.UsageError("instance has no matrix A")
    if protocol in ("singularity", "nonsingularity", "saturated",
                    "unimod_completable"):
        return {"A": a}
    if protocol in ("rank_lb", "rank_ub", "rank"):
        return {"A": a, "rho": rank_and_profile(a)[0]}
    if protocol == "determinant":
        return {"A": a, "delta": det_bareiss(a)}
    if protocol == "matmul":
        b = need("B")
        if b is None or b.m != a.n:
            raise click.UsageError("matmul needs B with matching dimensions")
        return {"A": a, "B": b, "C": a.mul(b)}
    if protocol in ("frrsm", "rsm"):
        v = need("v")
        if v is None:
            raise click.UsageError(f"{protocol} needs a planted-membership instance")
        return {"A": a, "v": v}
    if protocol in ("rs_subset", "rs_equality"):
        b = need("B")
        if b is None or b.n != a.n:
            raise click.UsageError(f"{protocol} needs B with the same column count")
        if protocol == "rs_subset":
            # guarantee a true statement: the stack [B; A] contains both row spaces
            return {"A": b, "B": b.stack(a) if a.n == b.n else b}
        return {"A": a.stack(b), "B": b.stack(a)}
    if protocol == "row_basis":
        h, _ = hermite_form(a)
        return {"A": a, "B": h}
    if protocol == "hermite":
        h = need("H")
        if h is None:
            h, _ = hermite_form(a)
        return {"A": a, "H": h}
    if protocol == "spopov":
        shift = [0] * a.n
        return {"A": a, "shift": shift, "P": popov_form(a, shift)}
    if protocol == "sat_basis":
        return {"A": a, "B": saturation_basis(a)}
    if protocol == "kernel_basis":
        return {"A": a, "B": kernel_basis_left(a)}
    raise click.UsageError(
        f"protocol {protocol} cannot be assembled from this instance; "
        f"supported: see README"
    )


def _common_params(field, sigma, strict, mode, seed):
    if sigma is None:
        sigma = field.p
    if not 1 <= sigma <= field.p:
        raise click.UsageError("need 1 <= sigma <= p")
    return ProtocolParams(p=field.p, sigma=sigma, mode=mode, strict=strict,
                          seed=seed if mode == MODE_INTERACTIVE else None)


@main.command()
@click.option("--protocol", type=click.Choice(PROTOCOL_IDS), required=True)
@click.option("--instance", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--sigma", type=int, default=None, help="sample set size (default: p)")
@click.option("--strict/--permissive", default=True, show_default=True)
@click.option("--prover-seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def prove(protocol, instance, sigma, strict, prover_seed, out):
    """Produce a Fiat-Shamir transcript for a statement about an instance."""
    field, _, objects = _load_instance(instance)
    pub = _publics_for(protocol, field, objects, prover_seed)
    params = _common_params(field, sigma, strict, MODE_FIAT_SHAMIR, None)
    try:
        verdict, transcript = run_protocol(protocol, pub, params,
                                           prover_seed=prover_seed)
    except ProverGaveUp as exc:
        click.echo(f"prover gave up: {exc}", err=True)
        sys.exit(2)
    transcript.meta["prover_seed"] = prover_seed
    transcript.save(out)
    click.echo(
        f"{protocol}: {'ACCEPT' if verdict.accepted else 'REJECT'} "
        f"({verdict.reason.value}); {transcript.comm_field_elements()} field "
        f"elements communicated; transcript -> {out}"
    )
    sys.exit(0 if verdict.accepted else 1)


@main.command()
@click.argument("transcript_file", type=click.Path(exists=True, dir_okay=False))
def verify(transcript_file):
    """Re-verify a stored transcript: recompute challenges, re-run all checks."""
    try:
        transcript = Transcript.load(transcript_file)
    except DigestMismatchError as exc:
        click.echo(f"REJECT: digest mismatch ({exc})")
        sys.exit(1)
    except TranscriptError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    verdict = verify_transcript(transcript)
    click.echo(
        f"{transcript.protocol_id}: {'ACCEPT' if verdict.accepted else 'REJECT'}"
        + ("" if verdict.accepted else f" ({verdict.reason.value}: {verdict.detail})")
    )
    sys.exit(0 if verdict.accepted else 1)


@main.command()
@click.option("--protocol", type=click.Choice(PROTOCOL_IDS), required=True)
@click.option("--instance", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mode", type=click.Choice([MODE_INTERACTIVE, MODE_FIAT_SHAMIR]),
              default=MODE_INTERACTIVE, show_default=True)
@click.option("--sigma", type=int, default=None)
@click.option("--seed", type=int, default=None, help="verifier randomness seed")
@click.option("--strict/--permissive", default=True, show_default=True)
@click.option("--prover-seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="also save the transcript")
def run(protocol, instance, mode, sigma, seed, strict, prover_seed, out):
    """Run both parties in process and print the verdict and communication."""
    field, _, objects = _load_instance(instance)
    pub = _publics_for(protocol, field, objects, prover_seed)
    seed = seed if seed is not None else _env_int("POLYCERT_SEED", 0)
    params = _common_params(field, sigma, strict, mode, seed)
    try:
        verdict, transcript = run_protocol(protocol, pub, params,
                                           prover_seed=prover_seed)
    except ProverGaveUp as exc:
        click.echo(f"prover gave up: {exc}", err=True)
        sys.exit(2)
    click.echo(f"{protocol}: {'ACCEPT' if verdict.accepted else 'REJECT'}"
               + ("" if verdict.accepted else f" ({verdict.reason.value})"))
    click.echo(f"communication: {transcript.comm_field_elements()} field elements")
    for key, count in sorted(transcript.comm_breakdown().items()):
        click.echo(f"  {key}: {count}")
    if "sigma_lower_bound" in transcript.meta:
        click.echo(f"advertised #S lower bound: {transcript.meta['sigma_lower_bound']} "
                   f"(sigma = {params.sigma})")
    if out:
        transcript.meta["prover_seed"] = prover_seed
        transcript.save(out)
        click.echo(f"transcript -> {out}")
    sys.exit(0 if verdict.accepted else 1)


@main.command()
@click.option("--suite", type=click.Choice(["completeness", "soundness", "acceptance"]),
              default=None)
@click.option("--protocol", type=str, default=None,
              help="single-protocol soundness experiment")
@click.option("--trials", type=int, default=None)
@click.option("--sigma", type=int, default=64, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--modulus", type=int, default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
def experiment(suite, protocol, trials, sigma, seed, modulus, out_dir):
    """Run completeness / soundness experiment suites and report pass/fail."""
    from .experiments import (
        SOUNDNESS_PROTOCOLS,
        run_completeness_experiment,
        run_soundness_experiment,
    )

    p = modulus if modulus is not None else _env_int("POLYCERT_MODULUS", DEFAULT_MODULUS)
    reports = []
    failed = False
    if protocol is not None and suite is None:
        if protocol not in SOUNDNESS_PROTOCOLS:
            raise click.UsageError(
                f"soundness experiments exist for: {', '.join(SOUNDNESS_PROTOCOLS)}"
            )
        rep = run_soundness_experiment(protocol, trials=trials or 2000,
                                       sigma=sigma, seed=seed, p=p)
        reports.append(rep)
    elif suite == "completeness":
        for pid in PROTOCOL_IDS:
            rep = run_completeness_experiment(pid, trials=trials or 100,
                                              seed=seed, p=p)
            reports.append(rep)
    elif suite == "soundness":
        for pid in SOUNDNESS_PROTOCOLS:
            for sg in (32, 64):
                rep = run_soundness_experiment(pid, trials=trials or 2000,
                                               sigma=sg, seed=seed, p=p)
                reports.append(rep)
    elif suite == "acceptance":
        for pid in PROTOCOL_IDS:
            reports.append(run_completeness_experiment(pid, trials=trials or 100,
                                                       seed=seed, p=p))
        for pid in SOUNDNESS_PROTOCOLS:
            for sg in (32, 64):
                reports.append(run_soundness_experiment(pid, trials=trials or 2000,
                                                        sigma=sg, seed=seed, p=p))
    else:
        raise click.UsageError("give --suite or --protocol")
    for rep in reports:
        doc = rep.to_json_dict()
        status = "pass" if rep.passed else "FAIL"
        if doc["kind"] == "completeness":
            click.echo(f"[{status}] completeness {rep.protocol_id}: "
                       f"{rep.rejections} rejections / {rep.trials} trials")
        else:
            click.echo(f"[{status}] soundness {rep.protocol_id} (sigma={rep.sigma}): "
                       f"rate {rep.rate:.4f} <= bound {rep.bound:.4f} "
                       f"+ 3se {rep.tolerance:.4f}")
        failed = failed or not rep.passed
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
            name = f"{doc['kind']}_{rep.protocol_id}"
            if doc["kind"] == "soundness":
                name += f"_s{rep.sigma}"
            with open(os.path.join(out_dir, name + ".json"), "w") as fh:
                json.dump(doc, fh, indent=1, sort_keys=True)
                fh.write("\n")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
