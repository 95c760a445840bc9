#include <stdio.h>

int gcd(int a,int b){
	if(b==0){
		return a;
	}
	return gcd(b,a%b);
}

int main(){
	int t,x,y;
	scanf("%d",&t);
	while(t--){
		scanf("%d %d",&x,&y);
		printf("%d\n",gcd(x,y));
	}
	return 0;
}
