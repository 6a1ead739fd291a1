//! Series arithmetic: Laurent series over system fields, truncations of
//! K{{t}} with the dual precision contract, Weierstrass division and
//! preparation, and expansions at the places of Weierstrass polynomials.

pub mod etale;
pub mod laurent;
pub mod mixed;
pub mod weier;

pub use etale::{expand_at_root, EtaleAlgebra, EtaleElt};
pub use laurent::LaurentSeries;
pub use mixed::MixedSeries;
pub use weier::{flip_expand, is_weierstrass, poly_to_series, series_divide, weierstrass_divide, weierstrass_prepare};
