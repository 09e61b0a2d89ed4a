mod enumerate;
mod kernel;
mod limit;
mod render;
mod sample;

pub use enumerate::run as enumerate;
pub use kernel::run as kernel;
pub use limit::run as limit;
pub use render::run as render;
pub use sample::run as sample;
