//! The bundled plant-monitoring demo: interaction model, simulated app and
//! device sets. Examples and tests use it as a ready-made system under test.

use crate::model::{parse_graphml, Model};
use crate::runner::{DeviceProfile, DeviceSet, HandlerRegistry};
use crate::sutsim::{SutSession, SutSpec};
use std::sync::Arc;

pub const GRAPHML: &str = include_str!("../fixtures/demo.graphml");
pub const SUT_JSON: &str = include_str!("../fixtures/demo-sut.json");
pub const DEVICES_JSON: &str = include_str!("../fixtures/devices.json");
/// Same lab plus a 320px-wide phone that hides the result count.
pub const DEVICES_MIXED_JSON: &str = include_str!("../fixtures/devices-mixed.json");

pub fn model() -> Model {
    parse_graphml(GRAPHML).expect("demo model parses")
}

pub fn sut_spec() -> Arc<SutSpec> {
    Arc::new(SutSpec::from_json(SUT_JSON).expect("demo SUT spec is valid"))
}

pub fn registry() -> HandlerRegistry {
    HandlerRegistry::from_bindings(&sut_spec().handlers).expect("demo handlers are unique")
}

pub fn devices() -> Vec<DeviceProfile> {
    DeviceSet::from_json(DEVICES_JSON).expect("demo devices").devices
}

pub fn mixed_devices() -> Vec<DeviceProfile> {
    DeviceSet::from_json(DEVICES_MIXED_JSON).expect("demo devices").devices
}

/// An installed session sized to the device's screen.
pub fn session_for(spec: &Arc<SutSpec>, device: &DeviceProfile) -> SutSession {
    SutSession::installed(spec.clone()).with_screen_width(device.screen.width)
}
