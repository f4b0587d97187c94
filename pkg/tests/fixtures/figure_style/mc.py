def read_input():
    return int(input())

def is_prime(x):
    if x < 2:
        return False
    d = 2
    while d * d <= x:
        if x % d == 0:
            return False
        d += 1
    return True

def sum_primes(n):
    total = 0
    for v in range(2, n + 1):
        if is_prime(v):
            total += v
    return total

n = read_input()
print(sum_primes(n))
