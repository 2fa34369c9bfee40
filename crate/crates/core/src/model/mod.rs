//! The ResDTA network: configuration, parameters, passes and checkpoints.

mod checkpoint;
mod config;
pub mod layers;
mod network;
mod params;

pub use checkpoint::{load_checkpoint, load_checkpoint_expecting, save_checkpoint, Checkpoint, FORMAT_VERSION};
pub use config::{conv_output_length, ConvGeometry, ModelConfig, ShapeChain, Stream};
pub use network::{
    accumulate_squared_error, combined_forward, forward, predict_one, stream_forward, Mode,
    SampleForward,
};
pub use params::{init_params, CombinedParams, Conv1d, Linear, ModelParams, StreamParams, TensorMut, TensorRef};
