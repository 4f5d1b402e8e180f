# cli/main.py
"""
Interface en ligne de commande : python -m cli.main <commande> ...

Codes de sortie : 0 succès, 1 assertion en échec, 2 entrée invalide,
3 budget numérique ou non-convergence.
"""
import sys
import argparse
from pathlib import Path
from utils.config import Config
from utils.errors import GromovError, InputError
from utils.logging_utils import setup_logger
from utils.serialization import dumps, SCHEMA_VERSION
from geometry.poly_core import RationalCurve, common_factor
from geometry.fs_geometry import energy, parse_region, density_grid
from bubbles.bubble_analysis import BubbleConfig, build_bubble_tree, mass_profile, point_from_text, DEFAULT_DELTAS
from bubbles.tree_of_spheres import validate, stability_check, arithmetic_genus
from lab.checks import CHECKS
from cli.schema import load, expect

logger = setup_logger("cli")

EXIT_OK = 0
EXIT_FAILED = 1


def _floats(text):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise InputError(f"liste de réels illisible : {text}") from e


def _emit(document, out=None):
    text = dumps(document)
    if out:
        Path(out).write_text(text + "\n", encoding='utf-8')
        logger.info(f"Rapport écrit dans {out}")
    else:
        print(text)


def cmd_factor(args):
    t = expect(load(args.file), "curve")
    fac = common_factor(t)
    _emit({
        "schema": SCHEMA_VERSION,
        "kind": "factorization",
        "roots": [{"point": pt.to_json(), "multiplicity": m} for pt, m in fac.roots],
        "factor_degree": fac.factor_degree,
        "residual": fac.residual.to_json(),
        "remainder_norm": fac.remainder_norm,
    }, args.out)
    return EXIT_OK


def cmd_energy(args):
    curve = RationalCurve(expect(load(args.file), "curve"))
    region = parse_region(args.region)
    result = energy(curve, region, args.tol, args.method)
    doc = {"schema": SCHEMA_VERSION, "kind": "energy", "region": region.to_json()}
    doc.update(result.to_json())
    _emit(doc, args.out)
    return EXIT_OK


def cmd_mass(args):
    fam = expect(load(args.file), "family")
    profile = mass_profile(fam, point_from_text(args.point), _floats(args.deltas), args.tol)
    doc = {"schema": SCHEMA_VERSION, "kind": "mass", "point": args.point}
    doc.update(profile.to_json())
    _emit(doc, args.out)
    return EXIT_OK


def cmd_bubble_tree(args):
    fam = expect(load(args.file), "family")
    cfg = BubbleConfig(mass_tol=args.mass_tol, connect_tol=args.connect_tol, quad_tol=args.quad_tol,
                       hbar=args.hbar, profile_masses=args.profile_masses)
    _emit(build_bubble_tree(fam, cfg).to_json(), args.out)
    return EXIT_OK


def cmd_density_grid(args):
    curve = RationalCurve(expect(load(args.file), "curve"))
    grid = density_grid(curve, args.extent, args.res, args.chart)
    if args.out:
        grid.to_csv(args.out, index=False)
        logger.info(f"Grille {args.res}×{args.res} écrite dans {args.out}")
    else:
        grid.to_csv(sys.stdout, index=False)
    return EXIT_OK


def cmd_verify(args):
    if args.config:
        entries = expect(load(args.config), "verify-config")
    elif args.check == "all":
        entries = [{"name": name} for name in CHECKS]
    elif args.check in CHECKS:
        entries = [{"name": args.check}]
    else:
        raise InputError(f"vérification inconnue : {args.check} (parmi {sorted(CHECKS)} ou all)")
    reports = []
    for entry in entries:
        check = CHECKS[entry["name"]](seed=entry.get("seed", args.seed), samples=entry.get("samples", args.samples),
                                      params=entry.get("params"))
        reports.append(check.run())
    passed = all(r.passed for r in reports)
    _emit({"schema": SCHEMA_VERSION, "kind": "verify", "passed": passed,
           "reports": [r.to_json() for r in reports]}, args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_stability(args):
    decorated = expect(load(args.file), "tree")
    violations = validate(decorated.tree)
    stable, offenders = stability_check(decorated)
    # le genre n'est défini que pour une configuration nodale valide
    genus = arithmetic_genus(decorated.tree.nodal_config()) if not violations else None
    _emit({
        "schema": SCHEMA_VERSION,
        "kind": "stability",
        "valid": not violations,
        "violations": [v.to_json() for v in violations],
        "stable": stable,
        "offenders": offenders,
        "arithmetic_genus": genus,
    }, args.out)
    return EXIT_OK if not violations else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog="gromov", description="Limites de Gromov et arbres de bulles de courbes rationnelles")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, needs_file=True):
        p = sub.add_parser(name, help=help_text)
        if needs_file:
            p.add_argument("file", help="document JSON d'entrée")
        p.add_argument("--out", default=None, help="fichier de sortie (sortie standard par défaut)")
        p.set_defaults(func=func)
        return p

    command("factor", cmd_factor, "facteur linéaire commun d'un n-uplet")

    p = command("energy", cmd_energy, "énergie d'une courbe sur une région")
    p.add_argument("--region", default="full", help='"full", "disk:cx,cy,r[,chart]", "annulus:cx,cy,rin,rout[,chart]"')
    p.add_argument("--tol", type=float, default=Config.QUAD_TOL)
    p.add_argument("--method", choices=["flux", "cells"], default="flux")

    p = command("mass", cmd_mass, "profil de masse d'une famille en un point")
    p.add_argument("--point", required=True, help='"re,im", "re" ou "inf"')
    p.add_argument("--deltas", default=",".join(str(d) for d in DEFAULT_DELTAS))
    p.add_argument("--tol", type=float, default=Config.QUAD_TOL)

    p = command("bubble-tree", cmd_bubble_tree, "arbre de bulles de la limite d'une famille")
    p.add_argument("--hbar", type=float, default=Config.HBAR)
    p.add_argument("--mass-tol", type=float, default=Config.MASS_TOL)
    p.add_argument("--connect-tol", type=float, default=Config.CONNECT_TOL)
    p.add_argument("--quad-tol", type=float, default=Config.QUAD_TOL)
    p.add_argument("--profile-masses", action="store_true", help="profils de masse des bulles de la racine")

    p = command("density-grid", cmd_density_grid, "grille CSV (x, y, rho) de la densité d'énergie")
    p.add_argument("--res", type=int, default=64)
    p.add_argument("--extent", type=float, default=2.0)
    p.add_argument("--chart", type=int, choices=[0, 1], default=0)

    p = command("verify", cmd_verify, "vérifications du laboratoire", needs_file=False)
    p.add_argument("check", nargs="?", default="all", help=f"{', '.join(CHECKS)} ou all")
    p.add_argument("--seed", type=int, default=Config.VERIFY_SEED)
    p.add_argument("--samples", type=int, default=Config.VERIFY_SAMPLES)
    p.add_argument("--config", default=None, help="document verify-config")

    command("stability", cmd_stability, "axiomes et stabilité d'un arbre décoré")
    return parser


def run(argv=None):
    """
    Exécuter une commande

    Args:
        argv (list): arguments (sys.argv[1:] par défaut)

    Returns:
        int: code de sortie
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except GromovError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
