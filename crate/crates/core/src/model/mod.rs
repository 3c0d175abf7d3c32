//! ConvNet descriptors: parsing, validation, shape inference and the
//! MAC/storage analytics derived from them.

mod analyze;
mod descriptor;
pub mod networks;
mod shapes;

pub use analyze::{mac_report, storage_report, LayerOps, LayerStorage, MacReport, StorageReport};
pub use descriptor::{
    parse_network, ActKind, LayerKind, LayerSpec, ModelError, NetworkDescriptor, PoolKind,
    INPUT_ID,
};
pub use shapes::{infer_shapes, LayerGeometry, Shape3D, ShapedLayer, ShapedNetwork};
