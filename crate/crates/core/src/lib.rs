//! Power consumption, solar harvesting, service time, coverage radius and
//! fleet dimensioning models for aerial base stations carried by rotary-wing
//! drones, fixed-wing drones and fixed-wing high-altitude platforms.
//!
//! Every function is a pure function of its arguments. Units are SI unless a
//! field says otherwise: masses in kg, weights in N, powers in W, energies in
//! Wh, frequencies in MHz, angles in degrees, path loss in dB.

pub mod coverage;
pub mod dimensioning;
pub mod endurance;
pub mod error;
pub mod payload;
pub mod platform;
pub mod solar;

pub use coverage::{
    coverage_radius, excess_loss_sample, free_space_path_loss, los_probability, mean_excess_path_loss,
    received_power, ChannelEnvironment, CoverageResult, CoverageSearch, LinkGeometry,
};
pub use dimensioning::{
    dimension, num_abs, num_backup_batteries, ChargingStation, DimensioningReport, DimensioningScenario,
    ServiceArea,
};
pub use endurance::{
    classify_endurance, harvest_ratio, rwd_service_time, total_power, BatterySpec, EnduranceResult,
    ServiceTime,
};
pub use error::{ModelError, Result};
pub use payload::{
    backhaul_power, bs_comm_power, check_feasibility, combined_bs_power, BsClass, BsProfile,
    CombinedBsPower, DeploymentMode, Feasibility, Verdict,
};
pub use platform::{
    fwd_propulsion_power, hap_avionics_power, hap_propulsion_power, mechanical_power, rwd_hover_power,
    FixedWingParams, HapParams, MassBudget, PayloadRule, PlatformKind, PlatformSpec, PlatformVariant,
    RotorParams, GRAVITY,
};
pub use solar::{average_harvested_power, daily_energy, panel_mass, Region, SolarPanel};
