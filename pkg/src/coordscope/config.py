"""Run configuration: a single YAML file, validated before any compute."""

from dataclasses import dataclass, field, fields, replace
from importlib import resources

import yaml

from coordscope.errors import CoordscopeError, ConfigError
from coordscope.problems import BUILTINS, make_problem
from coordscope.search import SearchSettings

TOP_KEYS = {"problem", "horizon", "search", "family", "planner", "output_dir", "seed"}
PROBLEM_KEYS = {"name", "params"}
FAMILY_KEYS = {"mode", "include_empty"}
PLANNER_KEYS = {"c", "q"}
SEARCH_KEYS = {f.name for f in fields(SearchSettings)} - {"seed"}
FIXED_HORIZON = {"static_separation": 1, "quadratic_coupling": 3}
CASES = ("fig1", "remark_q", "t6", "t10")


def _reject_unknown(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected a mapping, got {type(data).__name__}")
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(extra)}")


def _number(section, key, v, kind=float):
    # PyYAML reads "1e-10" (no decimal point) as a string
    if isinstance(v, str):
        try:
            v = float(v)
        except ValueError:
            raise ConfigError(f"{section}.{key}: expected a number, got {v!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {v!r}")
    if kind is int:
        if float(v) != int(v):
            raise ConfigError(f"{section}.{key}: expected an integer, got {v!r}")
        return int(v)
    return float(v)


def _rule(section, key, v, named):
    if isinstance(v, str):
        if v not in named:
            raise ConfigError(f"{section}.{key}: unknown rule {v!r}, expected one of {sorted(named)} or a list")
        return v
    if isinstance(v, list):
        return [_number(section, key, x) for x in v]
    raise ConfigError(f"{section}.{key}: expected a rule name or a list of numbers")


@dataclass(frozen=True)
class RunConfig:
    problem: str
    params: dict = field(default_factory=dict)
    horizon: int = 1
    search: SearchSettings = SearchSettings()
    family_mode: str = "contiguous"
    include_empty: bool = False
    c_rule: object = "cardinality"
    q_rule: object = "uniform"
    output_dir: str = "coordscope-out"
    seed: int = 0

    @classmethod
    def from_mapping(cls, data):
        if data is None:
            data = {}
        _reject_unknown("config", data, TOP_KEYS)
        prob = data.get("problem")
        if prob is None:
            raise ConfigError("config: missing required section 'problem'")
        _reject_unknown("problem", prob, PROBLEM_KEYS)
        name = prob.get("name")
        if name not in BUILTINS:
            raise ConfigError(f"problem.name: unknown problem {name!r}, expected one of {sorted(BUILTINS)}")
        params = prob.get("params") or {}
        _reject_unknown("problem.params", params, {"tau", "gamma", "rho"} if name != "quadratic_coupling" else set())
        params = {k: _number("problem.params", k, v) for k, v in params.items()}

        if name in FIXED_HORIZON:
            horizon = FIXED_HORIZON[name]
            if "horizon" in data and _number("config", "horizon", data["horizon"], int) != horizon:
                raise ConfigError(f"horizon: {name} has fixed horizon {horizon}")
        else:
            if "horizon" not in data:
                raise ConfigError(f"horizon: required for {name}")
            horizon = _number("config", "horizon", data["horizon"], int)

        seed = _number("config", "seed", data.get("seed", 0), int)
        srch = data.get("search") or {}
        _reject_unknown("search", srch, SEARCH_KEYS)
        skw = {}
        for k, v in srch.items():
            skw[k] = _number("search", k, v, int if k in ("restarts", "max_iter") else float)

        fam = data.get("family") or {}
        _reject_unknown("family", fam, FAMILY_KEYS)
        mode = fam.get("mode", "contiguous")
        include_empty = fam.get("include_empty", False)
        if not isinstance(include_empty, bool):
            raise ConfigError("family.include_empty: expected true or false")

        plan = data.get("planner") or {}
        _reject_unknown("planner", plan, PLANNER_KEYS)
        c_rule = _rule("planner", "c", plan.get("c", "cardinality"), {"cardinality"})
        q_rule = _rule("planner", "q", plan.get("q", "uniform"), {"uniform"})

        out = data.get("output_dir", "coordscope-out")
        if not isinstance(out, str):
            raise ConfigError("output_dir: expected a path string")

        try:
            settings = SearchSettings(seed=seed, **skw)
        except CoordscopeError as e:
            raise ConfigError(f"search: {e}") from e
        cfg = cls(name, params, horizon, settings, mode, include_empty, c_rule, q_rule, out, seed)
        cfg.validate()
        return cfg

    def validate(self):
        """Check every module precondition without running any compute."""
        from coordscope.classifier import POWER_SET_MAX_T

        try:
            self.build_problem()
        except CoordscopeError as e:
            raise ConfigError(f"problem: {e}") from e
        if self.family_mode not in ("contiguous", "power-set"):
            raise ConfigError(f"family.mode: expected 'contiguous' or 'power-set', got {self.family_mode!r}")
        if self.family_mode == "power-set" and self.horizon > POWER_SET_MAX_T:
            raise ConfigError(f"family.mode: power-set needs horizon <= {POWER_SET_MAX_T}")
        n_family = self.family_size()
        for key, rule in (("c", self.c_rule), ("q", self.q_rule)):
            if isinstance(rule, list) and len(rule) != n_family:
                raise ConfigError(f"planner.{key}: expected {n_family} entries, got {len(rule)}")
        if isinstance(self.c_rule, list) and any(v <= 0 for v in self.c_rule):
            raise ConfigError("planner.c: weights must be positive")
        if isinstance(self.q_rule, list):
            if any(v < 0 for v in self.q_rule) or abs(sum(self.q_rule) - 1.0) > 1e-12:
                raise ConfigError("planner.q: must be a distribution summing to 1")

    def family_size(self):
        T = self.horizon
        n = T * (T + 1) // 2 if self.family_mode == "contiguous" else 2**T - 1
        return n + (1 if self.include_empty else 0)

    def build_problem(self):
        if self.problem in FIXED_HORIZON:
            return make_problem(self.problem, **self.params)
        return make_problem(self.problem, T=self.horizon, **self.params)

    def with_overrides(self, seed=None, output_dir=None, restarts=None):
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=seed, search=replace(cfg.search, seed=seed))
        if restarts is not None:
            try:
                cfg = replace(cfg, search=replace(cfg.search, restarts=restarts))
            except CoordscopeError as e:
                raise ConfigError(f"--restarts: {e}") from e
        if output_dir is not None:
            cfg = replace(cfg, output_dir=output_dir)
        return cfg

    def echo(self):
        """Plain-data echo of every compute-relevant field (the output location is omitted)."""
        s = self.search
        return {
            "problem": {"name": self.problem, "params": dict(sorted(self.params.items()))},
            "horizon": self.horizon,
            "search": {
                "restarts": s.restarts,
                "box": s.box,
                "grad_tol": s.grad_tol,
                "max_iter": s.max_iter,
                "reg_floor": s.reg_floor,
                "dedup_tol": s.dedup_tol,
            },
            "family": {"mode": self.family_mode, "include_empty": self.include_empty},
            "planner": {"c": self.c_rule, "q": self.q_rule},
            "seed": self.seed,
        }


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e
    return RunConfig.from_mapping(data)


def bundled_config(case):
    if case not in CASES:
        raise ConfigError(f"unknown reproduction case {case!r}, expected one of {', '.join(CASES)}")
    text = resources.files("coordscope.configs").joinpath(f"{case}.yaml").read_text(encoding="utf-8")
    cfg = RunConfig.from_mapping(yaml.safe_load(text))
    return replace(cfg, output_dir=f"coordscope-out/{case}")
