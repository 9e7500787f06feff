//! Phase speeds of sinusoidal plane waves on a periodic strip, compared with
//! the continuum dilatational and shear speeds.
//!
//! ```bash
//! cargo run --release --example plane_waves -- 64
//! ```

use elastolbm::verify::wave_speed_error;

fn main() {
    let sites: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("sites per wavelength"))
        .unwrap_or(64);
    println!("{sites} sites per wavelength");
    for ratio in [3.0, 2.8] {
        for shear in [false, true] {
            let err = wave_speed_error(ratio, shear, sites).unwrap();
            let kind = if shear { "shear        " } else { "dilatational " };
            println!("  cd^2/cs^2 = {ratio}: {kind} relative speed error {err:+.3e}");
        }
    }
}
