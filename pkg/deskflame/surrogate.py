# -*- coding: utf-8 -*-
"""
PURPOSE:
    Per-species multilayer perceptrons that replace the stiff integrator:
    exact-erf GELU networks, a mini-batch Adam trainer, the binary weights
    format and the in-loop application with mass-fraction repair.

    Each network maps the normalized input row (T, p, Y_1..Y_n) to the
    normalized rate of change of one non-inert species over the training
    time step.

    Weights file layout (little-endian):

        b"MFNN", u32 version, u32 network count
        per network:
            u32 name length, name bytes (utf-8), u32 layer count
            per layer: u32 in, u32 out, float64 weights (out x in, row-major),
                       float64 bias (out)
            float64 input mean, input std (in of first layer)
            float64 output mean, output std (out of last layer)
        u32 CRC32 of every preceding byte

CREATED BY:
    deskflame developers
"""

import struct
import zlib

import numpy as np
import scipy.special

from . import tools
from .thermo import species_sum

MAGIC = b'MFNN'
FORMAT_VERSION = 1
DEFAULT_WIDTHS = (64, 32, 16)
_CORRECTION_REPORT = 1e-3
_SQRT2 = np.sqrt(2.0)
_SQRT2PI = np.sqrt(2.0 * np.pi)


class WeightsFormatError(ValueError):
    pass


class TrainingError(RuntimeError):
    """
    Training produced a non-finite loss. ``checkpoint`` holds the network
    after the last epoch with a finite loss.
    """
    def __init__(self, message, checkpoint, loss_history):
        super().__init__(message)
        self.checkpoint = checkpoint
        self.loss_history = loss_history


def gelu(x):
    """Exact GELU, 0.5 x (1 + erf(x/sqrt(2)))."""
    x = np.asarray(x, dtype=float)
    return 0.5 * x * (1.0 + scipy.special.erf(x / _SQRT2))


def gelu_derivative(x):
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + scipy.special.erf(x / _SQRT2)) + \
        x * np.exp(-0.5 * x * x) / _SQRT2PI


def _dense(x, weights, bias):
    """
    x @ weights.T + bias, accumulated input feature by input feature so
    each row's result does not depend on the other rows in the batch.
    """
    out = np.tile(bias, (x.shape[0], 1))
    for i in range(weights.shape[1]):
        out += x[:, i:i + 1] * weights[:, i]
    return out


class MlpNetwork:
    """
    Fully connected network with GELU hidden layers and a linear output.

    Parameters
    ----------
    weights : list of np.ndarray
        Layer matrices of shape (out, in)
    biases : list of np.ndarray
        Layer biases of shape (out,)
    input_mean, input_std : array_like or None
        Input z-score normalization; identity if None
    output_mean, output_std : array_like or None
        Output de-normalization; identity if None
    name : str
    """
    def __init__(
            self,
            weights,
            biases,
            input_mean=None,
            input_std=None,
            output_mean=None,
            output_std=None,
            name=''
    ):
        weights = [np.array(w, dtype=float) for w in weights]
        biases = [np.array(b, dtype=float) for b in biases]
        if not weights or len(weights) != len(biases):
            raise ValueError('Need one bias per weight matrix')
        for index, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(
                    'Layer {0}: weights {1} and bias {2} do not '
                    'match'.format(index, w.shape, b.shape)
                )
            if index and w.shape[1] != weights[index - 1].shape[0]:
                raise ValueError(
                    'Layer {0} expects {1} inputs but layer {2} gives '
                    '{3}'.format(index, w.shape[1], index - 1,
                                 weights[index - 1].shape[0])
                )
        n_in = weights[0].shape[1]
        n_out = weights[-1].shape[0]
        self.weights = weights
        self.biases = biases
        self.input_mean = self._norm(input_mean, n_in, 0.0, 'input mean')
        self.input_std = self._norm(input_std, n_in, 1.0, 'input std')
        self.output_mean = self._norm(output_mean, n_out, 0.0, 'output mean')
        self.output_std = self._norm(output_std, n_out, 1.0, 'output std')
        if np.any(self.input_std <= 0) or np.any(self.output_std <= 0):
            raise ValueError('Normalization std entries must be > 0')
        self.name = name

    @staticmethod
    def _norm(values, size, default, label):
        if values is None:
            return np.full(size, default)
        values = np.array(values, dtype=float).reshape(-1)
        if values.shape != (size,):
            raise ValueError(
                '{0} has {1} entries, expected {2}'.format(
                    label, values.shape[0], size
                )
            )
        return values

    @classmethod
    def initialize(cls, layer_sizes, seed=0, name=''):
        """
        Random network with Glorot-normal weights and zero biases.

        Parameters
        ----------
        layer_sizes : sequence of int
            Input width, hidden widths, output width
        seed : int or np.random.Generator
        """
        layer_sizes = [int(s) for s in layer_sizes]
        if len(layer_sizes) < 2 or min(layer_sizes) < 1:
            raise ValueError('Need at least input and output sizes >= 1')
        rng = seed if isinstance(seed, np.random.Generator) else \
            np.random.default_rng(seed)
        weights = []
        biases = []
        for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            scale = np.sqrt(2.0 / (n_in + n_out))
            weights.append(rng.normal(0.0, scale, (n_out, n_in)))
            biases.append(np.zeros(n_out))
        return cls(weights, biases, name=name)

    @property
    def n_inputs(self):
        return self.weights[0].shape[1]

    @property
    def n_outputs(self):
        return self.weights[-1].shape[0]

    @property
    def layer_sizes(self):
        return [self.n_inputs] + [w.shape[0] for w in self.weights]

    def copy(self):
        return MlpNetwork(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.input_mean.copy(), self.input_std.copy(),
            self.output_mean.copy(), self.output_std.copy(),
            self.name
        )

    def __eq__(self, other):
        if not isinstance(other, MlpNetwork) or self.name != other.name or \
                len(self.weights) != len(other.weights):
            return False
        pairs = list(zip(self.weights, other.weights)) + \
            list(zip(self.biases, other.biases)) + [
                (self.input_mean, other.input_mean),
                (self.input_std, other.input_std),
                (self.output_mean, other.output_mean),
                (self.output_std, other.output_std),
            ]
        return all(a.shape == b.shape and a.tobytes() == b.tobytes()
                   for a, b in pairs)

    def forward(self, inputs):
        """
        Physical outputs for physical inputs.

        Parameters
        ----------
        inputs : array_like
            (batch, n_inputs) or (n_inputs,)

        Returns
        -------
        np.ndarray
            (batch, n_outputs) or (n_outputs,)
        """
        x = np.asarray(inputs, dtype=float)
        single = x.ndim == 1
        x = x[None, :] if single else x
        if x.ndim != 2 or x.shape[1] != self.n_inputs:
            raise ValueError(
                'Input rows have {0} features, network expects {1}'.format(
                    x.shape[-1], self.n_inputs
                )
            )
        a = (x - self.input_mean) / self.input_std
        for index, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = _dense(a, w, b)
            if index < len(self.weights) - 1:
                a = gelu(a)
        y = a * self.output_std + self.output_mean
        return y[0] if single else y

    def loss_and_gradients(self, x_norm, y_norm):
        """
        Mean squared error in normalized space and its gradients with
        respect to every weight matrix and bias.

        Returns
        -------
        tuple
            (loss, weight gradients, bias gradients)
        """
        activations = [x_norm]
        pre_activations = []
        a = x_norm
        for index, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w.T + b
            pre_activations.append(z)
            a = gelu(z) if index < len(self.weights) - 1 else z
            activations.append(a)
        error = a - y_norm
        loss = float(np.mean(error * error))
        delta = 2.0 * error / error.size
        grad_w = [None] * len(self.weights)
        grad_b = [None] * len(self.weights)
        for index in range(len(self.weights) - 1, -1, -1):
            grad_w[index] = delta.T @ activations[index]
            grad_b[index] = delta.sum(axis=0)
            if index:
                delta = (delta @ self.weights[index]) * \
                    gelu_derivative(pre_activations[index - 1])
        return loss, grad_w, grad_b


class TrainerConfig:
    """
    Mini-batch Adam settings. ``seed`` drives the batch shuffling.
    """
    def __init__(
            self,
            learning_rate=1e-3,
            batch_size=64,
            epochs=100,
            seed=0,
            beta1=0.9,
            beta2=0.999,
            epsilon=1e-8
    ):
        if not learning_rate > 0:
            raise ValueError('learning_rate must be > 0')
        if int(batch_size) < 1 or int(epochs) < 1:
            raise ValueError('batch_size and epochs must be >= 1')
        if not (0 <= beta1 < 1 and 0 <= beta2 < 1):
            raise ValueError('Adam betas must be in [0, 1)')
        if not epsilon > 0:
            raise ValueError('epsilon must be > 0')
        self._learning_rate = float(learning_rate)
        self._batch_size = int(batch_size)
        self._epochs = int(epochs)
        self._seed = int(seed)
        self._beta1 = float(beta1)
        self._beta2 = float(beta2)
        self._epsilon = float(epsilon)

    def __setattr__(self, name, value):
        if not name.startswith('_'):
            raise PermissionError('TrainerConfig is read-only')
        super().__setattr__(name, value)

    @property
    def learning_rate(self):
        return self._learning_rate

    @property
    def batch_size(self):
        return self._batch_size

    @property
    def epochs(self):
        return self._epochs

    @property
    def seed(self):
        return self._seed

    @property
    def beta1(self):
        return self._beta1

    @property
    def beta2(self):
        return self._beta2

    @property
    def epsilon(self):
        return self._epsilon


def _z_score(values):
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    return mean, np.where(std > 0, std, 1.0)


def train(
        network,
        features,
        labels,
        config=None,
        normalize=True,
        verbose=False
):
    """
    Fits a network by mini-batch Adam on the mean squared error in
    normalized space.

    Parameters
    ----------
    network : MlpNetwork
        Initial network; it is not modified
    features : array_like
        (n_samples, n_inputs)
    labels : array_like
        (n_samples, n_outputs) or (n_samples,)
    config : TrainerConfig or None
    normalize : bool
        Replace the network's normalization by z-scores of the data
    verbose : bool
        Print the loss every tenth of the run

    Returns
    -------
    tuple
        (trained MlpNetwork, per-epoch loss over the whole data set)
    """
    config = config or TrainerConfig()
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    y = y[:, None] if y.ndim == 1 else y
    if x.ndim != 2 or x.shape[0] == 0 or x.shape[0] != y.shape[0]:
        raise ValueError('Features and labels must be non-empty and aligned')
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError('Features and labels must be finite')
    net = network.copy()
    if x.shape[1] != net.n_inputs or y.shape[1] != net.n_outputs:
        raise ValueError('Data does not match the network dimensions')
    if normalize:
        net.input_mean, net.input_std = _z_score(x)
        net.output_mean, net.output_std = _z_score(y)
    x_norm = (x - net.input_mean) / net.input_std
    y_norm = (y - net.output_mean) / net.output_std

    params = net.weights + net.biases
    first = [np.zeros_like(p) for p in params]
    second = [np.zeros_like(p) for p in params]
    rng = np.random.default_rng(config.seed)
    n_samples = x.shape[0]
    history = []
    step = 0
    checkpoint = net.copy()
    for epoch in range(config.epochs):
        order = rng.permutation(n_samples)
        for start in range(0, n_samples, config.batch_size):
            batch = order[start:start + config.batch_size]
            _, grad_w, grad_b = net.loss_and_gradients(
                x_norm[batch], y_norm[batch]
            )
            step += 1
            correction1 = 1.0 - config.beta1 ** step
            correction2 = 1.0 - config.beta2 ** step
            for p, g, m, v in zip(params, grad_w + grad_b, first, second):
                m *= config.beta1
                m += (1.0 - config.beta1) * g
                v *= config.beta2
                v += (1.0 - config.beta2) * g * g
                p -= config.learning_rate * (m / correction1) / (
                    np.sqrt(v / correction2) + config.epsilon
                )
        loss = net.loss_and_gradients(x_norm, y_norm)[0]
        if not np.isfinite(loss):
            raise TrainingError(
                'Non-finite loss in epoch {0}'.format(epoch), checkpoint,
                history
            )
        history.append(loss)
        checkpoint = net.copy()
        if verbose and (epoch + 1) % max(config.epochs // 10, 1) == 0:
            print('epoch {0:>6d}  loss {1:.6e}'.format(epoch + 1, loss))
    return net, history


class SurrogateBundle:
    """
    One network per non-inert species, sharing input width and input
    normalization.

    Parameters
    ----------
    networks : list of MlpNetwork
        Named after the species they predict
    training_dt : float or None
        Time step the labels were generated with, s
    """
    def __init__(self, networks, training_dt=None):
        networks = list(networks)
        if not networks:
            raise ValueError('Empty surrogate bundle')
        names = [n.name for n in networks]
        if len(set(names)) != len(names) or not all(names):
            raise ValueError('Networks need distinct species names')
        first = networks[0]
        for net in networks[1:]:
            if net.n_inputs != first.n_inputs or \
                    net.input_mean.tobytes() != first.input_mean.tobytes() or \
                    net.input_std.tobytes() != first.input_std.tobytes():
                raise ValueError(
                    'Network {0} does not share the input layout of '
                    '{1}'.format(net.name, first.name)
                )
            if net.n_outputs != 1:
                raise ValueError('Networks must have a single output')
        if training_dt is not None and not training_dt > 0:
            raise ValueError('training_dt must be > 0')
        self.networks = networks
        self.training_dt = None if training_dt is None else float(training_dt)

    @property
    def species(self):
        return [n.name for n in self.networks]

    @property
    def n_inputs(self):
        return self.networks[0].n_inputs

    def predict(self, inputs):
        """Rates of change per network, shape (n_networks, batch)."""
        return np.vstack([net.forward(inputs)[:, 0] for net in self.networks])

    def __eq__(self, other):
        return isinstance(other, SurrogateBundle) and \
            len(self.networks) == len(other.networks) and \
            all(a == b for a, b in zip(self.networks, other.networks))


def train_bundle(
        mechanism,
        samples,
        config=None,
        widths=DEFAULT_WIDTHS,
        training_dt=None,
        verbose=False
):
    """
    Trains one network per non-inert species on a sample table from
    ``chemistry.generate_samples``.

    Returns
    -------
    tuple
        (SurrogateBundle, dict of species -> loss history)
    """
    config = config or TrainerConfig()
    input_columns = ['T', 'p'] + ['Y_' + s for s in mechanism.species_names]
    missing = [c for c in input_columns if c not in samples.columns]
    if missing:
        raise ValueError('Sample table lacks columns: {0}'.format(missing))
    x = samples[input_columns].to_numpy(dtype=float)
    input_mean, input_std = _z_score(x)
    networks = []
    histories = {}
    for k, name in enumerate(mechanism.non_inert_species):
        column = 'rate_' + name
        if column not in samples.columns:
            raise ValueError('Sample table lacks column ' + column)
        net = MlpNetwork.initialize(
            [x.shape[1]] + list(widths) + [1],
            seed=config.seed + k,
            name=name
        )
        net.input_mean, net.input_std = input_mean, input_std
        y = samples[column].to_numpy(dtype=float)[:, None]
        net.output_mean, net.output_std = _z_score(y)
        if verbose:
            print('training network for ' + name)
        net, histories[name] = train(net, x, y, config, normalize=False,
                                     verbose=verbose)
        networks.append(net)
    return SurrogateBundle(networks, training_dt), histories


def _u32(value):
    return struct.pack('<I', value)


def save_weights(bundle, path):
    """Writes a bundle in the MFNN binary format."""
    chunks = [MAGIC, _u32(FORMAT_VERSION), _u32(len(bundle.networks))]
    for net in bundle.networks:
        name = net.name.encode('utf-8')
        chunks += [_u32(len(name)), name, _u32(len(net.weights))]
        for w, b in zip(net.weights, net.biases):
            chunks += [
                _u32(w.shape[1]), _u32(w.shape[0]),
                np.ascontiguousarray(w, dtype='<f8').tobytes(),
                np.ascontiguousarray(b, dtype='<f8').tobytes()
            ]
        for values in (net.input_mean, net.input_std,
                       net.output_mean, net.output_std):
            chunks.append(np.ascontiguousarray(values, dtype='<f8').tobytes())
    payload = b''.join(chunks)
    with open(path, 'wb') as f:
        f.write(payload)
        f.write(_u32(zlib.crc32(payload) & 0xffffffff))


class _Reader:
    def __init__(self, data):
        self._data = data
        self.position = 0

    def take(self, size):
        if self.position + size > len(self._data):
            raise WeightsFormatError('Truncated weights file')
        chunk = self._data[self.position:self.position + size]
        self.position += size
        return chunk

    def u32(self):
        return struct.unpack('<I', self.take(4))[0]

    def floats(self, count):
        return np.frombuffer(self.take(8 * count), dtype='<f8').astype(float)


def load_weights(path, training_dt=None):
    """
    Reads a bundle written by ``save_weights``. The file does not carry the
    training time step; pass it here to enable the step check.
    """
    with open(path, 'rb') as f:
        data = f.read()
    reader = _Reader(data)
    if reader.take(4) != MAGIC:
        raise WeightsFormatError('Not a weights file: bad magic bytes')
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise WeightsFormatError(
            'Unsupported weights format version {0}'.format(version)
        )
    networks = []
    for _ in range(reader.u32()):
        try:
            name = reader.take(reader.u32()).decode('utf-8')
        except UnicodeDecodeError:
            raise WeightsFormatError('Network name is not valid UTF-8')
        weights = []
        biases = []
        for _ in range(reader.u32()):
            n_in = reader.u32()
            n_out = reader.u32()
            weights.append(reader.floats(n_in * n_out).reshape(n_out, n_in))
            biases.append(reader.floats(n_out))
        if not weights:
            raise WeightsFormatError('Network {0} has no layers'.format(name))
        n_in = weights[0].shape[1]
        n_out = weights[-1].shape[0]
        norms = [reader.floats(n_in), reader.floats(n_in),
                 reader.floats(n_out), reader.floats(n_out)]
        try:
            networks.append(MlpNetwork(weights, biases, *norms, name=name))
        except ValueError as err:
            raise WeightsFormatError(
                'Network {0}: {1}'.format(name, err)
            )
    checksum = reader.u32()
    if reader.position != len(data):
        raise WeightsFormatError('Trailing bytes after checksum')
    if checksum != zlib.crc32(data[:-4]) & 0xffffffff:
        raise WeightsFormatError('Checksum mismatch')
    try:
        return SurrogateBundle(networks, training_dt)
    except ValueError as err:
        raise WeightsFormatError(str(err))


def check_time_step(bundle, dt):
    """
    dt must equal the training step or divide it an integer number of
    times. A bundle without a recorded training step is rejected.
    """
    if not dt > 0:
        raise ValueError('dt must be > 0')
    if bundle.training_dt is None:
        raise ValueError(
            'Surrogate training time step unknown; set surrogate_dt'
        )
    ratio = bundle.training_dt / dt
    if ratio < 1 - 1e-9 or abs(ratio - round(ratio)) > 1e-9 * ratio:
        raise ValueError(
            'Time step {0:g} s is not an integer fraction of the training '
            'step {1:g} s'.format(dt, bundle.training_dt)
        )


def apply_surrogate_field(
        bundle,
        mechanism,
        temperature,
        pressure,
        mass_fractions,
        dt
):
    """
    Chemistry update from the networks: Y_k += rate_k dt for every predicted
    species, inert species absorb the residual, then Y is clipped to [0, 1]
    and renormalized and T follows from the unchanged absolute enthalpy.

    Returns
    -------
    tuple
        (temperature, mass_fractions)
    """
    check_time_step(bundle, dt)
    names = mechanism.species_names
    if bundle.n_inputs != 2 + len(names):
        raise ValueError(
            'Bundle expects {0} inputs, mechanism gives {1}'.format(
                bundle.n_inputs, 2 + len(names)
            )
        )
    if sorted(bundle.species) != sorted(mechanism.non_inert_species):
        raise ValueError(
            'Bundle species {0} do not match the non-inert species '
            '{1}'.format(bundle.species, mechanism.non_inert_species)
        )
    temperature = np.atleast_1d(np.asarray(temperature, dtype=float))
    y_old = np.array(mass_fractions, dtype=float)
    y_old = y_old[:, None] if y_old.ndim == 1 else y_old
    n = temperature.shape[0]
    pressure = np.broadcast_to(
        np.atleast_1d(np.asarray(pressure, dtype=float)), (n,)
    )
    thermo = mechanism.thermo
    h_conserved = species_sum(y_old * thermo.species_h(temperature))

    inputs = np.vstack([temperature[None, :], pressure[None, :], y_old]).T
    rates = bundle.predict(inputs)
    y = y_old.copy()
    for net_index, name in enumerate(bundle.species):
        y[mechanism.index(name)] += rates[net_index] * dt

    residual = 1.0 - species_sum(y)
    inert = [mechanism.index(s) for s in mechanism.inert_species]
    if inert:
        inert_total = species_sum(y[inert])
        for position, k in enumerate(inert):
            share = np.where(
                inert_total > 0,
                y[k] / np.where(inert_total > 0, inert_total, 1.0),
                1.0 if position == 0 else 0.0
            )
            y[k] = y[k] + share * residual
    else:
        y = y / species_sum(y)

    repaired = np.clip(y, 0.0, 1.0)
    repaired = repaired / species_sum(repaired)
    correction = np.max(np.abs(repaired - y), axis=0)
    n_bad = int(np.count_nonzero(correction > _CORRECTION_REPORT))
    if n_bad:
        tools.warn(
            'Surrogate mass fractions corrected by more than {0:g} in {1} '
            'cell(s)'.format(_CORRECTION_REPORT, n_bad),
            tools.FidelityWarning,
            'surrogate_correction',
            n_bad
        )
    t_new = thermo.T_from_h(h_conserved, pressure, repaired, temperature)
    return t_new, repaired
