//! Writes the six-DMU example matrix as CSV and JSON.
//!
//!     cargo run -p vga-core --example export_dataset -- data

use vga_core::dataset::example_matrix;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    std::fs::create_dir_all(&dir)?;
    let m = example_matrix();
    std::fs::write(format!("{dir}/example.csv"), m.to_csv_string())?;
    std::fs::write(format!("{dir}/example.json"), m.to_json_string() + "\n")?;
    println!("wrote {dir}/example.csv and {dir}/example.json ({})", m.hash());
    Ok(())
}
