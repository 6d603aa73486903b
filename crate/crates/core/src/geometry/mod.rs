//! Coordinate charts on flat spacetime and the differential geometry of weighted
//! vector densities.
//!
//! Index conventions: a chart maps unprimed (Cartesian) coordinates `x` to primed
//! coordinates `x'`. All fields produced by [`pullback_metric`] live on primed
//! coordinates. Points are slices `[t, x, ...]`; tensors are sized at runtime, so the
//! machinery works for any `d+1` even though the built-in charts are 1+1.
//!
//! - `Γ^α_{μν}` is stored as [`Christoffel::get`]`(α, μ, ν)`.
//! - `(𝒢_μ)^α_β = Γ^α_{μβ} - w δ^α_β Γ^ρ_{ρμ}` is [`ConnectionCoefficients::get`]`(μ, α, β)`.
//! - Gradients of vector fields are matrices with entry `(μ, ρ) = ∂_ρ n^μ`.

mod chart;
mod density;
pub mod expr;
pub mod fd;
mod metric;

pub use chart::{Chart, ChartKind};
pub use density::{
    canonical_normal_density, canonical_normal_field, canonical_normal_gradient,
    connection_transform_check, density_connection, density_covariant_derivative,
    transform_density_vector, ConnectionCoefficients, DensityConnection, DensityVectorField,
};
pub use metric::{
    christoffel, metric_compatibility_deviation, pullback_metric, riemann, Christoffel,
    ChristoffelField, DerivativeMode, MetricField,
};
