"""Run configuration: a flat ``key = value`` text format.

Top-level keys come first; each ``[strip]`` or ``[profile]`` header opens
a new record, in order.  ``#`` starts a comment.  Numeric values may be
simple arithmetic expressions in ``pi`` (e.g. ``pi/2 - 1.05``).
Serialization writes resolved floats with ``repr`` so a parse/serialize
round trip is exact.
"""
import ast
import math
import operator
from dataclasses import asdict, dataclass, field, fields, replace

from .errors import ValidationError

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "tau": 2.0 * math.pi}


def eval_number(text, key=None):
    """Evaluate a numeric literal or arithmetic expression over ``pi``/``tau``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError

    try:
        return ev(ast.parse(text.strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError):
        raise ValidationError(f"cannot parse number {text!r}", key=key) from None


@dataclass(frozen=True)
class ProfileConfig:
    x: float
    y: float
    r_max: float
    amplitude: float
    steepness: float = 40.0
    family: str = "edge"


@dataclass(frozen=True)
class StripConfig:
    a: float
    b: float


@dataclass(frozen=True)
class RunConfig:
    N: int = 256
    dt: float = 1e-3
    t_end: float = 1.0
    snapshot_stride: int = 100
    cfl_cap: float = 0.5
    allow_cfl_violation: bool = False
    shear_steepness: float = 5.0
    gap_amplitudes: tuple = ()
    strips: tuple = ()
    profiles: tuple = ()
    output: str = ""
    workers: int = 1

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def to_dict(self):
        d = asdict(self)
        d["gap_amplitudes"] = list(self.gap_amplitudes)
        d["strips"] = [asdict(s) for s in self.strips]
        d["profiles"] = [asdict(p) for p in self.profiles]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["gap_amplitudes"] = tuple(float(a) for a in d.get("gap_amplitudes", ()))
        d["strips"] = tuple(StripConfig(**s) for s in d.get("strips", ()))
        d["profiles"] = tuple(ProfileConfig(**p) for p in d.get("profiles", ()))
        return cls(**d)


_TOP_TYPES = {f.name: f.type for f in fields(RunConfig) if f.name not in ("strips", "profiles")}
_INT_KEYS = {"N", "snapshot_stride", "workers"}
_BOOL_KEYS = {"allow_cfl_violation"}
_STR_KEYS = {"output"}
_SECTION_KEYS = {
    "strip": {f.name for f in fields(StripConfig)},
    "profile": {f.name for f in fields(ProfileConfig)},
}


def _convert(key, raw, path):
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ValidationError(f"expected a boolean, got {raw!r}", key=path)
        return low in ("true", "1", "yes")
    if key in _STR_KEYS or key == "family":
        return raw.strip()
    if key == "gap_amplitudes":
        items = [s for s in raw.split(",") if s.strip()]
        return tuple(float(eval_number(s, key=path)) for s in items)
    value = eval_number(raw, key=path)
    if key in _INT_KEYS:
        if float(value) != int(value):
            raise ValidationError(f"expected an integer, got {raw!r}", key=path)
        return int(value)
    return float(value)


def parse_config(text):
    top = {}
    strips, profiles = [], []
    current, section = None, None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SECTION_KEYS:
                raise ValidationError(f"unknown section [{section}] on line {lineno}")
            current = {}
            (strips if section == "strip" else profiles).append(current)
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if section is None:
            if key not in _TOP_TYPES:
                raise ValidationError(f"unknown key on line {lineno}", key=key)
            top[key] = _convert(key, raw, key)
        else:
            idx = len(strips if section == "strip" else profiles) - 1
            path = f"{section}[{idx}].{key}"
            if key not in _SECTION_KEYS[section]:
                raise ValidationError(f"unknown key on line {lineno}", key=path)
            current[key] = _convert(key, raw, path)
    try:
        strip_objs = tuple(StripConfig(**s) for s in strips)
    except TypeError as exc:
        raise ValidationError(f"incomplete [strip] section: {exc}", key="strip") from None
    try:
        profile_objs = tuple(ProfileConfig(**p) for p in profiles)
    except TypeError as exc:
        raise ValidationError(f"incomplete [profile] section: {exc}", key="profile") from None
    return RunConfig(strips=strip_objs, profiles=profile_objs, **top)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(a)) for a in v)
    return str(v)


def serialize_config(cfg):
    lines = ["# resolved eqp run configuration"]
    for f in fields(RunConfig):
        if f.name in ("strips", "profiles"):
            continue
        lines.append(f"{f.name} = {_fmt(getattr(cfg, f.name))}")
    for s in cfg.strips:
        lines += ["", "[strip]"] + [f"{f.name} = {_fmt(getattr(s, f.name))}" for f in fields(StripConfig)]
    for p in cfg.profiles:
        lines += ["", "[profile]"] + [f"{f.name} = {_fmt(getattr(p, f.name))}" for f in fields(ProfileConfig)]
    return "\n".join(lines) + "\n"


DEFAULT_CONFIG_TEXT = """\
# two flat strips, one traveling vortex in each
N = 256
dt = 0.001
t_end = 1.0
snapshot_stride = 100
cfl_cap = 0.5
shear_steepness = 5.0
gap_amplitudes = 40, -40

[strip]
a = pi/2 - 1.05
b = pi/2 + 1.05

[strip]
a = 3*pi/2 - 1.05
b = 3*pi/2 + 1.05

[profile]
x = pi/2
y = 1.0
r_max = 0.5
amplitude = 0.0125
steepness = 40

[profile]
x = 3*pi/2
y = 4.0
r_max = 0.5
amplitude = -0.0125
steepness = 40
"""


def default_config():
    return parse_config(DEFAULT_CONFIG_TEXT)


def build_solution(cfg):
    """Construct the QuasiPeriodicSolution described by a RunConfig."""
    from .analytic import assemble
    from .radial_profile import make_default_profile
    from .shear_flow import build_shear_flow

    flow = build_shear_flow([(s.a, s.b) for s in cfg.strips], cfg.gap_amplitudes, steepness=cfg.shear_steepness)
    profiles = []
    for n, p in enumerate(cfg.profiles):
        try:
            profiles.append(make_default_profile((p.x, p.y), p.r_max, p.amplitude, p.steepness, p.family))
        except ValidationError as exc:
            raise ValidationError(str(exc).split(": ", 1)[-1], key=f"profile[{n}].{exc.key or 'value'}") from None
    try:
        return assemble(flow, profiles)
    except ValidationError as exc:
        key = exc.key.replace("profiles[", "profile[") if exc.key else None
        raise ValidationError(str(exc).split(": ", 1)[-1], key=key) from None
