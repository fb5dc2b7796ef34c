pub fn min_bound(v: &mut Vec<u64>, N: u32)
    requires
        old(v).len() == N,
        N >= 1,
{
    let mut i: usize = 1;
    let mut m: u64 = v[0];
    while (i < N as usize)
    {
        if (v[i] < m) {
            m = v[i];
        }
        i = i + 1;
    }
    assert(m <= v[0]);
}
