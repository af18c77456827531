"""REPL and batch front end.

Every line is one command; arguments are separated by whitespace that is not
nested inside brackets, braces or parentheses.  ``let`` and ``cert`` take the
whole remainder of the line after ``=``.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, SplitRingError
from .euclid import (
    RElement,
    as_relement,
    div_step,
    euclid_run,
    prop9_witness,
    random_supported_candidates,
    refute_norm_report,
)
from .factor import (
    Certificate,
    cert_cofactor,
    cert_gcd,
    certify,
    parse_certificate,
    phi,
)
from .ringcore import (
    Element,
    Indet,
    Kind,
    coefficients_in,
    divide,
    from_laurent,
    parse_element,
    parse_laurent,
    set_max_terms,
    spread,
    to_laurent,
    try_divide,
    valuation,
)
from .ringcore.text import Cursor
from .tower import SESSION_HEADER, LinearFreshVariable, PrimeHandle, TIndeterminate, Tower, min_u_stage, t_var

SESSION_FILE_HEADER = "splitring-session 1"

VERBS = (
    "let", "split", "fresht", "freshu", "mul", "add", "divides", "val", "spread", "rank",
    "coeffs", "laurent", "member", "cert", "phi", "gcd", "cofactor", "divstep", "euclid",
    "prop9", "refute", "save", "load", "show", "quit",
)


@dataclass
class Command:
    verb: str
    args: list
    name: str | None = None
    rest: str = ""
    line: str = ""


@dataclass
class Session:
    tower: Tower = field(default_factory=Tower)
    bindings: dict = field(default_factory=dict)
    history: list = field(default_factory=list)
    seed: int = 0

    def dump_lines(self):
        lines = [f"TOWER {ln}" for ln in self.tower.dump_lines()]
        for name, value in self.bindings.items():
            lines.append(binding_line(name, value))
        return lines

    def dumps(self):
        lines = [SESSION_FILE_HEADER]
        lines += self.tower.dump_lines()
        lines += [f"BIND {binding_line(n, v)}" for n, v in self.bindings.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text, seed=0):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != SESSION_FILE_HEADER:
            raise ParseError("not a splitring session file")
        sess = cls(seed=seed)
        for ln in lines[1:]:
            if ln.startswith("BIND "):
                out = execute_line(ln[5:], sess)
                if out.startswith("error:"):
                    raise ParseError(f"cannot restore binding: {out}")
            else:
                sess.tower.replay_line(ln)
        sess.history = []
        return sess


def binding_line(name, value):
    if isinstance(value, Certificate):
        return f"cert {name} = {value.key}"
    if isinstance(value, RElement):
        if value.cert is not None:
            return f"let {name} = {value.cert.key} / {value.den.key}"
        return f"let {name} = {value.num.key} / {value.den.key}"
    return f"let {name} = {value.key}"


# -- parsing ---------------------------------------------------------------

def split_args(text):
    args, depth, cur = [], 0, []
    for ch in text:
        if ch in "[{(":
            depth += 1
        elif ch in "]})":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                args.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        args.append("".join(cur))
    return args


def parse_command(line):
    """Parse one command line into a :class:`Command`."""
    text = line.strip()
    if not text:
        raise ParseError("empty command", 0, line)
    verb, _, rest = text.partition(" ")
    if verb not in VERBS:
        raise ParseError(f"unknown command {verb!r}", 0, line)
    rest = rest.strip()
    if verb in ("let", "cert"):
        name, eq, body = rest.partition("=")
        name = name.strip()
        if not eq or not name.replace("_", "a").replace("'", "a").isalnum():
            raise ParseError(f"usage: {verb} NAME = ...", len(verb) + 1, line)
        return Command(verb, [], name=name, rest=body.strip(), line=line)
    args = split_args(rest)
    name = None
    if len(args) >= 2 and args[-2] == "as":
        name = args[-1]
        args = args[:-2]
    return Command(verb, args, name=name, rest=rest, line=line)


# -- execution ---------------------------------------------------------------

class _Env:
    """Argument coercion against a session's bindings."""

    def __init__(self, session):
        self.s = session

    def lookup(self, name):
        v = self.s.bindings[name]
        if isinstance(v, Certificate):
            return v.value()
        if isinstance(v, RElement):
            if v.den.factors or v.den.unit != 1:
                raise KeyError(name)
            return v.num
        return v

    def element(self, text):
        return parse_element(text, self.s.tower, self.lookup)

    def cert(self, text):
        v = self.s.bindings.get(text)
        if isinstance(v, Certificate):
            return v
        if isinstance(v, RElement) and v.cert is not None and not v.den.factors and v.den.unit == 1:
            return v.cert
        return parse_certificate(text, self.s.tower, self.s.bindings.__getitem__)

    def relement(self, text):
        v = self.s.bindings.get(text)
        if isinstance(v, (RElement, Certificate)):
            return as_relement(v)
        if text.strip() in ("0", "{0}"):
            return RElement.zero()
        return RElement(self.cert(text))

    def indet(self, text):
        v = self.s.bindings.get(text)
        if isinstance(v, Certificate) and len(v.factors) == 1 and v.unit == 1 and v.factors[0][1] == 1:
            return v.factors[0][0].indet
        e = self.element(text)
        if len(e.terms) == 1 and e.terms[0][1] == 1 and len(e.terms[0][0]) == 1 and e.terms[0][0][0][1] == 1:
            return e.terms[0][0][0][0]
        raise ParseError(f"{text!r} is not a single indeterminate")

    def handle(self, text):
        v = self.s.bindings.get(text)
        if isinstance(v, Certificate) and len(v.factors) == 1 and v.unit == 1 and v.factors[0][1] == 1:
            return v.factors[0][0]
        return PrimeHandle(self.indet(text))


def _need(cmd, n, usage):
    if len(cmd.args) < n:
        raise ParseError(f"usage: {cmd.verb} {usage}")


def _linear_tag(p, env, evidence):
    """Find a fresh variable in which ``p`` is linear, for the split command."""
    candidates = [v for v in p.indets() if v.kind in (Kind.T, Kind.U) and v.stage == p.rank]
    for x in sorted(candidates, key=lambda v: v.sortkey, reverse=True):
        coeffs = coefficients_in(p, x)
        if len(coeffs) != 2:
            continue
        a, b = coeffs[0], -coeffs[1]
        if a.is_zero():
            continue
        a_cert = b_cert = None
        if evidence is not None:
            if evidence.value() == a:
                a_cert = evidence
            elif evidence.value() == b:
                b_cert = evidence
        return LinearFreshVariable(a, x, b, a_cert=a_cert, b_cert=b_cert)
    return None


def _cmd_split(cmd, env):
    _need(cmd, 1, "EXPR [with CERT] [as NAME]")
    args = list(cmd.args)
    evidence = None
    if len(args) >= 3 and args[-2] == "with":
        evidence = env.cert(args[-1])
        args = args[:-2]
    p = env.element(" ".join(args))
    if p.is_constant():
        tag = TIndeterminate()
    elif len(p.terms) == 1 and len(p.terms[0][0]) == 1 and p.terms[0][0][0][0].kind == Kind.T and p.terms[0][0][0][1] == 1:
        tag = TIndeterminate()
    else:
        tag = _linear_tag(p, env, evidence) or TIndeterminate()
    sigma, sigma_c, lam = env.s.tower.split(p, tag)
    out = [f"sigma = {sigma.key}", f"sigma' = {sigma_c.key}", f"lambda = {lam}"]
    binds = {}
    if cmd.name:
        binds[cmd.name] = Certificate(lam, {sigma: 1, sigma_c: 1})
        binds[f"{cmd.name}_s"] = Certificate.of_handle(sigma)
        binds[f"{cmd.name}_c"] = Certificate.of_handle(sigma_c)
    return out, binds


def _cmd_freshu(cmd, env):
    _need(cmd, 3, "STAGE|auto A B [as NAME]")
    a = env.element(cmd.args[1])
    btext = cmd.args[2]
    bval = env.s.bindings.get(btext)
    if isinstance(bval, Certificate):
        bcert = bval
    else:
        b = env.element(btext)
        stage_hint = None if cmd.args[0] == "auto" else int(cmd.args[0]) - 1
        bcert = certify(env.s.tower, b, max_stage=stage_hint) if not b.is_zero() else b
    acert = env.s.bindings.get(cmd.args[1]) if isinstance(env.s.bindings.get(cmd.args[1]), Certificate) else None
    if cmd.args[0] == "auto":
        stage = min_u_stage(a, bcert, acert)
    else:
        stage = int(cmd.args[0])
    u, h = env.s.tower.fresh_u(stage, a, bcert, acert=acert)
    binds = {cmd.name: Certificate.of_handle(h)} if cmd.name else {}
    return [f"u = {u.key}", f"unit prime = {h.key}", f"value = {h.value().key}"], binds


def _cmd_let(cmd, env):
    body = cmd.rest
    depth = 0
    cut = None
    for i, ch in enumerate(body):
        if ch in "[{(":
            depth += 1
        elif ch in "]})":
            depth -= 1
        elif depth == 0 and body.startswith(" / ", i - 1) and ch == "/":
            cut = i
    if cut is not None:
        left, right = body[:cut].strip(), body[cut + 1:].strip()
        den = env.cert(right)
        if left.startswith("{"):
            value = RElement(env.element(left), den)
        else:
            value = RElement(env.cert(left).value(), den, env.cert(left))
    else:
        value = env.element(body)
    return [binding_line(cmd.name, value)], {cmd.name: value}


def _cmd_cert(cmd, env):
    c = env.cert(cmd.rest)
    return [binding_line(cmd.name, c)], {cmd.name: c}


def _cmd_refute(cmd, env):
    _need(cmd, 1, "P [Q V ...] | P random N")
    p = env.handle(cmd.args[0])
    rest = cmd.args[1:]
    if rest[:1] == ["random"]:
        n = int(rest[1]) if len(rest) > 1 else 3
        cands = random_supported_candidates(p, env.s.tower, n, seed=env.s.seed)
    else:
        if len(rest) % 2:
            raise ParseError("refute expects (Q V) pairs")
        cands = [(env.element(rest[i]), env.cert(rest[i + 1])) for i in range(0, len(rest), 2)]
    report = refute_norm_report(p, cands, env.s.tower)
    return ([report] if report else []), {}


def _relement_text(x):
    return x.key


def execute(cmd, session):
    """Run one command; returns the output text.  Failed commands change nothing."""
    env = _Env(session)
    tw = session.tower
    binds = {}
    with tw.transaction():
        v = cmd.verb
        if v == "let":
            out, binds = _cmd_let(cmd, env)
        elif v == "cert":
            out, binds = _cmd_cert(cmd, env)
        elif v == "split":
            out, binds = _cmd_split(cmd, env)
        elif v == "fresht":
            k = int(cmd.args[0]) if cmd.args else tw.max_stage() + 1
            t = t_var(k)
            out = [t.key]
            if cmd.name:
                binds[cmd.name] = t
        elif v == "freshu":
            out, binds = _cmd_freshu(cmd, env)
        elif v in ("mul", "add"):
            _need(cmd, 2, "X Y [as NAME]")
            x, y = env.element(cmd.args[0]), env.element(cmd.args[1])
            r = x * y if v == "mul" else x + y
            out = [r.key]
            if cmd.name:
                binds[cmd.name] = r
        elif v == "divides":
            _need(cmd, 2, "X D")
            q = try_divide(env.element(cmd.args[0]), env.element(cmd.args[1]))
            out = ["not divisible" if q is None else f"quotient = {q.key}"]
            if cmd.name and q is not None:
                binds[cmd.name] = q
        elif v == "val":
            _need(cmd, 2, "X P")
            out = [str(valuation(env.element(cmd.args[0]), env.element(cmd.args[1])))]
        elif v == "spread":
            _need(cmd, 2, "E S")
            out = [str(spread(env.element(cmd.args[0]), env.indet(cmd.args[1])))]
        elif v == "rank":
            _need(cmd, 1, "E")
            out = [str(env.element(" ".join(cmd.args)).rank)]
        elif v == "coeffs":
            _need(cmd, 2, "E X")
            cs = coefficients_in(env.element(cmd.args[0]), env.indet(cmd.args[1]))
            if isinstance(cs, dict):
                out = [f"{g}: {c.key}" for g, c in cs.items()]
            else:
                out = [f"{i}: {c.key}" for i, c in enumerate(cs)]
        elif v == "laurent":
            _need(cmd, 1, "E")
            out = [to_laurent(env.element(" ".join(cmd.args))).key]
        elif v == "member":
            _need(cmd, 1, "LAURENT")
            l = parse_laurent(" ".join(cmd.args), tw, env.lookup)
            e = from_laurent(l)
            out = [e.key]
            if cmd.name:
                binds[cmd.name] = e
        elif v == "phi":
            _need(cmd, 1, "C")
            x = env.s.bindings.get(cmd.args[0])
            out = [str(x.phi() if isinstance(x, RElement) else phi(env.cert(cmd.args[0])))]
        elif v == "gcd":
            _need(cmd, 2, "C D [as NAME]")
            g = cert_gcd(env.cert(cmd.args[0]), env.cert(cmd.args[1]))
            out = [g.key]
            if cmd.name:
                binds[cmd.name] = g
        elif v == "cofactor":
            _need(cmd, 2, "C G [as NAME]")
            c = cert_cofactor(env.cert(cmd.args[0]), env.cert(cmd.args[1]))
            out = [c.key]
            if cmd.name:
                binds[cmd.name] = c
        elif v == "divstep":
            _need(cmd, 2, "A B [as NAME]")
            st = div_step(env.relement(cmd.args[0]), env.relement(cmd.args[1]), tw)
            out = [
                f"case {st.case}",
                f"q = {_relement_text(st.q)}",
                f"r = {'0' if st.r.is_zero() else _relement_text(st.r)}",
                f"phi(b) = {st.phi_b}   phi(r) = {'-' if st.phi_r is None else st.phi_r}",
            ]
            if cmd.name:
                binds[f"{cmd.name}_q"] = st.q
                binds[f"{cmd.name}_r"] = st.r
        elif v == "euclid":
            _need(cmd, 2, "A B")
            tr = euclid_run(env.relement(cmd.args[0]), env.relement(cmd.args[1]), tw)
            out = [tr.render()]
        elif v == "prop9":
            _need(cmd, 3, "P V Q")
            p = env.handle(cmd.args[0])
            vv = env.cert(cmd.args[1])
            qb = env.s.bindings.get(cmd.args[2])
            q = qb if isinstance(qb, RElement) else env.element(cmd.args[2])
            w = prop9_witness(p, vv, q, tw)
            out = [
                f"r = {w.r.key}",
                f"p1 = {w.sigma1.key}",
                f"p2 = {w.sigma2.key}",
                f"lambda = {w.lam}",
                f"common = {w.common.key}",
            ]
        elif v == "refute":
            out, binds = _cmd_refute(cmd, env)
        elif v == "save":
            _need(cmd, 1, "FILE")
            with open(cmd.args[0], "w", encoding="utf-8", newline="\n") as fh:
                fh.write(session.dumps())
            out = [f"saved {len(tw.events)} events, {len(session.bindings)} bindings"]
        elif v == "load":
            _need(cmd, 1, "FILE")
            with open(cmd.args[0], encoding="utf-8") as fh:
                other = Session.loads(fh.read(), seed=session.seed)
            session.tower = other.tower
            session.bindings = other.bindings
            out = [f"loaded {len(other.tower.events)} events, {len(other.bindings)} bindings"]
        elif v == "show":
            if cmd.args:
                name = cmd.args[0]
                if name not in session.bindings:
                    raise ParseError(f"unknown name {name!r}")
                out = [binding_line(name, session.bindings[name])]
            else:
                out = session.dump_lines()
        elif v == "quit":
            out = []
        else:  # pragma: no cover - parse_command rejects unknown verbs
            raise ParseError(f"unknown command {v!r}")
    session.bindings.update(binds)
    session.history.append(cmd.line)
    return "\n".join(out)


def describe_error(exc):
    name = type(exc).__name__
    hint = getattr(exc, "hint", "")
    return f"error: {name}: {exc}" + (f" ({hint})" if hint else "")


def execute_line(line, session):
    try:
        cmd = parse_command(line)
        return execute(cmd, session)
    except SplitRingError as exc:
        return describe_error(exc)
    except (ValueError, TypeError, ZeroDivisionError, OSError) as exc:
        return f"error: {type(exc).__name__}: {exc}"


def run_lines(lines, session, out):
    for raw in lines:
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.strip() == "quit":
            return False
        text = execute_line(line, session)
        if text:
            out.write(text + "\n")
    return True


def main(argv=None):
    ap = argparse.ArgumentParser(prog="splitring", description=__doc__.splitlines()[0])
    ap.add_argument("--script", help="run commands from FILE and exit")
    ap.add_argument("--session", help="load the session from FILE if it exists; save it on exit")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampling commands")
    ap.add_argument("--max-terms", type=int, default=10000, help="expansion guard")
    opts = ap.parse_args(argv)
    set_max_terms(opts.max_terms)
    session = Session(seed=opts.seed)
    if opts.session and os.path.exists(opts.session):
        with open(opts.session, encoding="utf-8") as fh:
            session = Session.loads(fh.read(), seed=opts.seed)
    out = sys.stdout
    if opts.script:
        with open(opts.script, encoding="utf-8") as fh:
            run_lines(fh, session, out)
    else:
        interactive = sys.stdin.isatty()
        while True:
            if interactive:
                sys.stderr.write("> ")
                sys.stderr.flush()
            line = sys.stdin.readline()
            if not line:
                break
            if not run_lines([line], session, out):
                break
            out.flush()
    if opts.session:
        with open(opts.session, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(session.dumps())
    return 0


if __name__ == "__main__":
    sys.exit(main())
