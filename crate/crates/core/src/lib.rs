pub mod certify;
pub mod diagonal_isogeny;
pub mod elliptic;
pub mod exact_poly;
pub mod ff_oracle;
pub mod height_bounds;
pub mod preimage_equations;
pub mod product_variety;
