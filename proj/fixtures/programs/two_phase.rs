pub fn two_phase_update(a: &mut Vec<u32>, N: u32)
    requires
        old(a).len() == N,
        N <= 0xFFFF,
{
    let mut i: usize = 0;
    while (i < N as usize)
    {
        a.set(i, 1);
        i = i + 1;
    }
    i = 0;
    while (i < N as usize)
    {
        a.set(i, 2);
        i = i + 1;
    }
    assert(a.len() == N);
}
