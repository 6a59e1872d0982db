//! Single exchanges under each saving rule, and the reduction chain
//! distributed → uniform → no saving.

use kwem::kernels::{
    exchange_bidirectional, exchange_distributed_saving, exchange_no_saving,
    exchange_uniform_saving,
};

fn main() -> kwem::Result<()> {
    let (wi, wj, r) = (1.0, 3.0, 0.4);

    let o = exchange_no_saving(wi, wj, r)?;
    println!(
        "no saving          ({wi}, {wj}) -> ({}, {})",
        o.wi_new, o.wj_new
    );

    for lambda in [0.0, 0.5, 0.9, 1.0] {
        let o = exchange_uniform_saving(wi, wj, lambda, r)?;
        println!(
            "uniform λ={lambda:<4}     ({wi}, {wj}) -> ({}, {})",
            o.wi_new, o.wj_new
        );
    }

    let o = exchange_distributed_saving(wi, wj, 0.9, 0.1, r)?;
    println!(
        "distributed .9/.1  ({wi}, {wj}) -> ({}, {})",
        o.wi_new, o.wj_new
    );

    let o = exchange_bidirectional(wi, wj, r, 0.6)?;
    println!(
        "bi-directional     ({wi}, {wj}) -> ({}, {})",
        o.wi_new, o.wj_new
    );

    assert_eq!(
        exchange_distributed_saving(wi, wj, 0.4, 0.4, r)?,
        exchange_uniform_saving(wi, wj, 0.4, r)?
    );
    assert_eq!(
        exchange_uniform_saving(wi, wj, 0.0, r)?,
        exchange_no_saving(wi, wj, r)?
    );
    println!("reduction chain holds bit-for-bit");

    if let Err(e) = exchange_uniform_saving(wi, wj, 1.2, r) {
        println!("rejected: {e}");
    }
    Ok(())
}
