"""sketchsynth: drive a latent audio synthesizer by drawing.

Pipeline: sketches are rasterised and encoded by an autoencoder into a
32-dimensional latent; an interactively-trained mapper projects that
onto the 16-dimensional control latent of an audio synthesizer (built-in
additive backend, or an external one over OSC). A session engine owns
the record/randomise/train/run workflow and speaks WebSocket to the UI
and OSC/UDP to audio tooling.
"""

from .autoencoder import (
    AutoencoderModel,
    Hyperparams,
    decode,
    encode,
    load_model,
    new_model,
    save_model,
    train_autoencoder,
)
from .config import EngineConfig, load_config
from .mapper import (
    ExampleStore,
    KnnIdwMapper,
    MapperConfig,
    MlpMapper,
    TrainingExample,
    add_example,
    load_mapper,
    save_mapper,
)
from .osc import OscBundle, OscMessage, decode_packet, encode_bundle, encode_message, encode_packet
from .sketch import Raster, SketchFrame, affine_transform, frame_from_strokes, rasterize
from .synth import AudioBlock, SynthParams, SynthState, initial_state, latent_to_params, render
from .session import (
    SessionMode,
    SessionState,
    handle_command,
    handle_sketch_event,
    load_session,
    new_session,
    randomize_latent,
    save_session,
)

__version__ = "0.1.0"
