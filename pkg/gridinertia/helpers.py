import hashlib
import json
import os
import subprocess
import numpy as np

# Stream tags keep independent random decisions of one seed apart.
STREAM_NODE_PARAMS = 0
STREAM_VSG_SELECTION = 1
STREAM_TOPOLOGY = 2
STREAM_INJECTIONS = 3


def random_stream(seed, *key):
    """ Portable numpy PCG64 generator for (seed, key...). Each key gives an independent, reproducible stream. """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))))


def node_stream(seed, node_id):
    return random_stream(seed, STREAM_NODE_PARAMS, node_id)


def stable_hash(obj, length=16):
    text = json.dumps(obj, sort_keys=True, separators=(',', ':'), default=_json_default)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:length]


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError("Object of type %s is not JSON serializable" % type(obj).__name__)


def git_describe(path=None):
    """ `git describe` of the directory holding the configuration, or 'unversioned' outside a repository """
    path = path or os.getcwd()
    if os.path.isfile(path):
        path = os.path.dirname(os.path.abspath(path))
    try:
        out = subprocess.run(['git', 'describe', '--always', '--dirty', '--tags'], cwd=path,
                             stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, timeout=10)
    except (OSError, subprocess.SubprocessError):
        return 'unversioned'
    if out.returncode != 0:
        return 'unversioned'
    return out.stdout.decode().strip() or 'unversioned'


def format_float(value):
    """ Shortest round-trip repr, so written rows are byte-identical for identical floats """
    if value is None:
        return ''
    value = float(value)
    if np.isnan(value):
        return 'nan'
    if np.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return repr(value)
