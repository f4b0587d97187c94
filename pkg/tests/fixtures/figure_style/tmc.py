def check_prime(value):
    if value < 2:
        return False
    divisor = 2
    while divisor * divisor <= value:
        if value % divisor == 0:
            return False
        divisor += 1
    return True

def solve(limit):
    answer = 0
    for candidate in range(2, limit + 1):
        if check_prime(candidate):
            answer += candidate
    return answer

print(solve(int(input())))
