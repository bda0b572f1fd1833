"""Scenario files: flat `key = value` experiment descriptions.

Lines hold one or more `key = value` pairs separated by `;`, `#` starts a
comment, and list values are comma separated (brackets optional). Unknown
keys, malformed values and out-of-range values are rejected with the key and
line number. See README.md for the full schema.
"""
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from config.settings import Settings
from features.channel.models import AngleSet, SystemConfig
from features.channel.synthesis import draw_angles
from features.shared.errors import ScenarioError
from features.shared.numerics import RngStream, StreamPurpose

KINDS = (
    'bound-check',
    'converge',
    'compare-rician',
    'compare-rayleigh',
    'fading-compare',
    'power-sweep',
    'moments',
)
SWEEP_VARIABLES = ('N', 'M', 'P_dbm', 'K')
INIT_MODES = ('ones', 'random')

_INT_CONFIG_KEYS = ('M', 'N')
_POSITIVE_CONFIG_KEYS = ('bandwidth_hz', 'd0', 'd1', 'd2', 'alpha0', 'alpha1', 'alpha2')
_FINITE_CONFIG_KEYS = ('P_dbm', 'noise_psd_dbm_hz')
_K_KEYS = ('K', 'K0', 'K1', 'K2')
_ANGLE_KEYS = ('theta_aoa_1', 'theta_aod_1', 'theta_aod_2', 'theta_aod_0')
_RUN_KEYS = ('kind', 'sweep', 'values', 'trials', 'seed', 'output', 'epsilon', 'max_iter', 'init')
KNOWN_KEYS = _INT_CONFIG_KEYS + _POSITIVE_CONFIG_KEYS + _FINITE_CONFIG_KEYS + _K_KEYS + _ANGLE_KEYS + _RUN_KEYS


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    kind: str = 'bound-check'
    config: SystemConfig = field(default_factory=SystemConfig)
    sweep: Optional[Sweep] = None
    trials: int = Settings.DEFAULT_TRIALS
    seed: int = Settings.DEFAULT_SEED
    output_path: Path = Settings.RESULTS_DIR / 'scenario.csv'
    epsilon: float = Settings.EPSILON
    max_iter: int = Settings.MAX_ITER
    init: str = 'ones'
    source_name: str = '<defaults>'
    source_digest: str = ''

    def sweep_points(self) -> List[Tuple[Optional[float], SystemConfig]]:
        """(sweep value, config) per point, in file order"""
        if self.sweep is None:
            return [(None, self.config)]
        points = []
        for value in self.sweep.values:
            if self.sweep.variable in ('N', 'M'):
                config = self.config.replace(**{self.sweep.variable: int(value)})
            elif self.sweep.variable == 'P_dbm':
                config = self.config.replace(P_dbm=value)
            else:
                config = self.config.with_k(value)
            points.append((value, config))
        return points


def _strip_comment(text: str) -> str:
    quote = None
    for i, ch in enumerate(text):
        if ch in ('"', "'"):
            quote = None if quote == ch else (ch if quote is None else quote)
        elif ch == '#' and quote is None:
            return text[:i]
    return text


def _unquote(value: str) -> str:
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ('"', "'"):
        return value[1:-1]
    return value


def _tokenize(text: str) -> Dict[str, Tuple[str, int]]:
    entries: Dict[str, Tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        for part in _strip_comment(raw).split(';'):
            part = part.strip()
            if not part:
                continue
            if '=' not in part:
                raise ScenarioError(f"expected 'key = value', got {part!r}", line=lineno)
            key, _, value = part.partition('=')
            key, value = key.strip(), _unquote(value.strip())
            if key not in KNOWN_KEYS:
                raise ScenarioError("unknown key", key=key, line=lineno)
            if key in entries:
                raise ScenarioError(f"duplicate key (first set on line {entries[key][1]})", key=key, line=lineno)
            if value == '':
                raise ScenarioError("missing value", key=key, line=lineno)
            entries[key] = (value, lineno)
    return entries


def _to_float(key: str, value: str, line: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise ScenarioError(f"not a number: {value!r}", key=key, line=line) from None


def _to_int(key: str, value: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        pass
    # exponent forms such as 1e4 must still be exact integers
    number = _to_float(key, value, line)
    if not math.isfinite(number) or not number.is_integer():
        raise ScenarioError(f"not an integer: {value!r}", key=key, line=line)
    return int(number)


def _check_range(key: str, value: float, line: int, variable: str) -> float:
    """Range rules shared by plain keys and sweep values"""
    if variable in _INT_CONFIG_KEYS:
        if value < 1 or value != int(value):
            raise ScenarioError(f"{variable} must be a positive integer, got {value:g}", key=key, line=line)
    elif variable in _K_KEYS:
        if math.isnan(value) or value < 0:
            raise ScenarioError(f"Rician K-factor must be >= 0, got {value:g}", key=key, line=line)
    elif variable in _POSITIVE_CONFIG_KEYS:
        if not (math.isfinite(value) and value > 0):
            raise ScenarioError(f"must be positive, got {value:g}", key=key, line=line)
    elif not math.isfinite(value):
        raise ScenarioError(f"must be finite, got {value:g}", key=key, line=line)
    return value


def _parse_values(value: str, line: int, variable: str) -> Tuple[float, ...]:
    body = value.strip()
    if body.startswith('[') and body.endswith(']'):
        body = body[1:-1]
    items = [item.strip() for item in body.split(',') if item.strip()]
    if not items:
        raise ScenarioError("sweep needs at least one value", key='values', line=line)
    return tuple(_check_range('values', _to_float('values', item, line), line, variable) for item in items)


def parse_scenario(path: Union[str, Path], seed: Optional[int] = None, trials: Optional[int] = None,
                   output: Optional[Union[str, Path]] = None) -> Scenario:
    """Parse a scenario file into a fully populated Scenario.

    Unspecified fields take the SystemConfig and Settings defaults. `seed`, `trials` and `output`
    override the file (command-line flags). Angles not fixed in the file are
    drawn once from the scenario seed and shared by all sweep points.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e.strerror or e}") from e
    try:
        text = raw.decode('utf-8')
    except UnicodeDecodeError as e:
        raise ScenarioError(f"scenario file {path} is not UTF-8") from e
    entries = _tokenize(text)

    def get(key: str) -> Optional[Tuple[str, int]]:
        return entries.get(key)

    kind = 'bound-check'
    if get('kind'):
        kind, line = get('kind')
        if kind not in KINDS:
            raise ScenarioError(f"kind must be one of {', '.join(KINDS)}, got {kind!r}", key='kind', line=line)

    overrides: Dict[str, float] = {}
    for key in _INT_CONFIG_KEYS:
        if get(key):
            value, line = get(key)
            overrides[key] = int(_check_range(key, _to_int(key, value, line), line, key))
    for key in _POSITIVE_CONFIG_KEYS + _FINITE_CONFIG_KEYS:
        if get(key):
            value, line = get(key)
            overrides[key] = _check_range(key, _to_float(key, value, line), line, key)
    if get('K'):
        value, line = get('K')
        joint = _check_range('K', _to_float('K', value, line), line, 'K')
        overrides.update(K0=joint, K1=joint, K2=joint)
    for key in ('K0', 'K1', 'K2'):
        if get(key):
            value, line = get(key)
            overrides[key] = _check_range(key, _to_float(key, value, line), line, key)

    sweep = None
    if get('sweep') or get('values'):
        if not get('sweep'):
            raise ScenarioError("values given without a sweep variable", key='sweep', line=get('values')[1])
        variable, line = get('sweep')
        if variable not in SWEEP_VARIABLES:
            raise ScenarioError(f"sweep must be one of {', '.join(SWEEP_VARIABLES)}, got {variable!r}",
                                key='sweep', line=line)
        if not get('values'):
            raise ScenarioError("missing sweep values", key='values', line=line)
        values, values_line = get('values')
        sweep = Sweep(variable=variable, values=_parse_values(values, values_line, variable))

    if trials is None:
        trials = Settings.DEFAULT_TRIALS
        if get('trials'):
            value, line = get('trials')
            trials = _to_int('trials', value, line)
            if trials < 1:
                raise ScenarioError(f"must be >= 1, got {trials}", key='trials', line=line)
    elif trials < 1:
        raise ScenarioError(f"must be >= 1, got {trials}", key='trials')

    if seed is None:
        seed = Settings.DEFAULT_SEED
        if get('seed'):
            value, line = get('seed')
            seed = _to_int('seed', value, line)
            if not 0 <= seed < 2**64:
                raise ScenarioError(f"must fit in 64 unsigned bits, got {seed}", key='seed', line=line)
    elif not 0 <= seed < 2**64:
        raise ScenarioError(f"must fit in 64 unsigned bits, got {seed}", key='seed')

    epsilon = Settings.EPSILON
    if get('epsilon'):
        value, line = get('epsilon')
        epsilon = _to_float('epsilon', value, line)
        if not (math.isfinite(epsilon) and epsilon > 0):
            raise ScenarioError(f"must be positive, got {value}", key='epsilon', line=line)

    max_iter = Settings.MAX_ITER
    if get('max_iter'):
        value, line = get('max_iter')
        max_iter = _to_int('max_iter', value, line)
        if max_iter < 1:
            raise ScenarioError(f"must be >= 1, got {max_iter}", key='max_iter', line=line)

    init = 'ones'
    if get('init'):
        init, line = get('init')
        if init not in INIT_MODES:
            raise ScenarioError(f"must be one of {', '.join(INIT_MODES)}, got {init!r}", key='init', line=line)

    angles = draw_angles(RngStream(seed, 0, StreamPurpose.ANGLES))
    fixed = {}
    for key in _ANGLE_KEYS:
        if get(key):
            value, line = get(key)
            fixed[key] = _check_range(key, _to_float(key, value, line), line, key)
    if fixed:
        angles = AngleSet(**{**{k: getattr(angles, k) for k in _ANGLE_KEYS}, **fixed})

    if output is None:
        output = Path(get('output')[0]) if get('output') else Settings.RESULTS_DIR / f"{path.stem}.csv"

    return Scenario(
        kind=kind,
        config=SystemConfig(angles=angles, **overrides),
        sweep=sweep,
        trials=trials,
        seed=seed,
        output_path=Path(output),
        epsilon=epsilon,
        max_iter=max_iter,
        init=init,
        source_name=path.name,
        source_digest=hashlib.sha256(raw).hexdigest(),
    )
