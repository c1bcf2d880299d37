//! Equivariant layers: gated activations, dense, tensor and tensor-dense.
//!
//! Parameters serialize to a little-endian blob with magic `"E3PR"`; the kind field
//! distinguishes dense (`0`) from tensor (`1`) parameters.

mod activation;
mod dense;
mod tensor;

pub use activation::{activation, activation_with, ActivationKind, Gate};
pub use dense::{dense_apply, dense_init, DenseParams};
pub use tensor::{
    tensor_apply, tensor_dense_apply, valid_paths, FeatureShape, TensorParams, TensorPath,
};

use crate::error::{Error, Result};
use crate::irreps::Layout;

pub const PARAMS_MAGIC: &[u8; 4] = b"E3PR";
pub const PARAMS_VERSION: u32 = 1;
const KIND_DENSE: u32 = 0;
const KIND_TENSOR: u32 = 1;

fn layout_from_rows(rows: u32) -> Result<Layout> {
    match rows {
        1 => Ok(Layout::Compact),
        2 => Ok(Layout::General),
        p => Err(Error::Format(format!(
            "parity axis must have size 1 or 2, got {p}"
        ))),
    }
}
